"""Round-based simulator for LEACH, SEP, ESEP, TEEN and TSEP clustering."""

from .config import PRESETS, ExperimentPreset, load_config, parse_config
from .engine import Comparison, RunSummary, run_ensemble, run_scenario, simulate, summarize_comparison
from .field import Field, FieldModel
from .netmodel import (
    ConfigError, Network, Node, Position, Protocol, ScenarioConfig, Tier, TierScheme, deploy_network,
)
from .protocols import ReactiveConfig, RoundRecord
from .radio import DeadNodeError, RadioParams

__version__ = "0.1.0"

__all__ = [
    "PRESETS", "ExperimentPreset", "load_config", "parse_config", "Comparison", "RunSummary",
    "run_ensemble", "run_scenario", "simulate", "summarize_comparison", "Field", "FieldModel",
    "ConfigError", "Network", "Node", "Position", "Protocol", "ScenarioConfig", "Tier",
    "TierScheme", "deploy_network", "ReactiveConfig", "RoundRecord", "DeadNodeError", "RadioParams",
]
