"""TOML scenario files and the built-in experiment presets.

Every key is optional; missing keys take the defaults below (radio constants
from the usual first-order model parameter table).  Unknown sections or keys
are rejected.

.. code-block:: toml

    [scenario]
    protocol = "TSEP"          # LEACH | SEP | ESEP | TEEN | TSEP
    n = 100
    field_side = 100.0         # m, square field
    bs_position = [50.0, 50.0] # m, default: field centre
    e0 = 0.5                   # J, normal-node initial energy
    max_rounds = 10000
    seed = 0
    frames_per_round = 1
    immortal = false           # true: batteries never drain

    [tiers]
    m = 0.1                    # advanced fraction
    b = 0.3                    # intermediate fraction
    alpha = 1.0                # advanced extra-energy factor
    mu = 0.5                   # intermediate factor, default alpha/2
    p_opt = 0.1

    [radio]
    e_elec = 50e-9             # J/bit
    e_da = 5e-9                # J/bit/signal
    eps_fs = 10e-12            # J/bit/m^2
    eps_mp = 0.0013e-12        # J/bit/m^4
    packet_bits = 4000
    ctrl_bits = 200            # 0 disables control overhead
    e_sense = 0.0              # J/node/round

    [reactive]                 # TEEN and TSEP only
    hard_threshold = 50.0
    soft_threshold = 2.0
    attributes = ["temperature"]
    report_time = 1

    [field]
    baseline = 25.0
    event_probability = 0.005
    magnitude_low = 40.0
    magnitude_high = 80.0
    drift_sigma = 0.5
    drift_reversion = 0.1
    event_duration = 5
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from .field import FieldModel
from .netmodel import ConfigError, Position, Protocol, ScenarioConfig, TierScheme
from .protocols import ReactiveConfig
from .radio import RadioParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_INT, _FLOAT, _BOOL, _STR = int, float, bool, str

SCHEMA = {
    "scenario": {
        "protocol": _STR, "n": _INT, "field_side": _FLOAT, "bs_position": list,
        "e0": _FLOAT, "max_rounds": _INT, "seed": _INT, "frames_per_round": _INT,
        "immortal": _BOOL,
    },
    "tiers": {"m": _FLOAT, "b": _FLOAT, "alpha": _FLOAT, "mu": _FLOAT, "p_opt": _FLOAT},
    "radio": {
        "e_elec": _FLOAT, "e_da": _FLOAT, "eps_fs": _FLOAT, "eps_mp": _FLOAT,
        "packet_bits": _INT, "ctrl_bits": _INT, "e_sense": _FLOAT,
    },
    "reactive": {
        "hard_threshold": _FLOAT, "soft_threshold": _FLOAT, "attributes": list,
        "report_time": _INT,
    },
    "field": {
        "baseline": _FLOAT, "event_probability": _FLOAT, "magnitude_low": _FLOAT,
        "magnitude_high": _FLOAT, "drift_sigma": _FLOAT, "drift_reversion": _FLOAT,
        "event_duration": _INT,
    },
}


def _check(section: str, key: str, value):
    want = SCHEMA[section][key]
    ok = {
        _INT: isinstance(value, int) and not isinstance(value, bool),
        _FLOAT: isinstance(value, (int, float)) and not isinstance(value, bool),
        _BOOL: isinstance(value, bool),
        _STR: isinstance(value, str),
        list: isinstance(value, list),
    }[want]
    if not ok:
        raise ConfigError(f"[{section}] {key}: expected {want.__name__}, got {value!r}")
    return float(value) if want is _FLOAT else value


def parse_config(text: str, protocol: Protocol | str | None = None, source: str = "<config>") -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from TOML text.

    ``protocol`` overrides ``[scenario] protocol``; a ``[reactive]`` block is
    then kept only if the resulting protocol is reactive.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from None

    sections = {}
    for section, body in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"{source}: [{section}] must be a table")
        values = {}
        for key, value in body.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            values[key] = _check(section, key, value)
        sections[section] = values

    try:
        return _build(sections, protocol)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid value: {exc}") from None


def _build(sections: dict, protocol) -> ScenarioConfig:
    sc = dict(sections.get("scenario", {}))
    overridden = protocol is not None
    if protocol is None:
        protocol = Protocol.parse(sc.pop("protocol", "LEACH"))
    else:
        sc.pop("protocol", None)
        protocol = Protocol.parse(protocol) if isinstance(protocol, str) else protocol

    if "bs_position" in sc:
        bs = sc["bs_position"]
        if len(bs) != 2 or not all(isinstance(v, (int, float)) for v in bs):
            raise ConfigError("[scenario] bs_position must be a pair of numbers")
        sc["bs_position"] = Position(float(bs[0]), float(bs[1]))
    if "seed" in sc:
        sc["rng_seed"] = sc.pop("seed")

    reactive = None
    if protocol.reactive:
        rv = dict(sections.get("reactive", {}))
        if "attributes" in rv:
            rv["attributes"] = tuple(str(a) for a in rv["attributes"])
        reactive = ReactiveConfig(**rv)
    elif "reactive" in sections and not overridden:
        raise ConfigError(f"a [reactive] block was given for proactive protocol {protocol.value}")

    return ScenarioConfig(
        tiers=TierScheme(**sections.get("tiers", {})),
        radio=RadioParams(**sections.get("radio", {})),
        field_model=FieldModel(**sections.get("field", {})),
        reactive=reactive,
        protocol=protocol,
        **sc,
    )


def load_config(path, protocol: Protocol | str | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, protocol=protocol, source=str(path))


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    base: ScenarioConfig
    protocols: tuple[Protocol, ...]
    seeds: tuple[int, ...]

    def with_seed_count(self, count: int) -> ExperimentPreset:
        return dataclasses.replace(self, seeds=tuple(range(count)))

    def configs(self) -> dict[Protocol, ScenarioConfig]:
        return {p: self.base.for_protocol(p) for p in self.protocols}


# long enough for every protocol in both scenarios to die out
PRESET_MAX_ROUNDS = 200_000

PRESETS = {
    "paper-case-1": ExperimentPreset(
        name="paper-case-1",
        base=ScenarioConfig(tiers=TierScheme(m=0.1, b=0.3, alpha=1.0), max_rounds=PRESET_MAX_ROUNDS),
        protocols=tuple(Protocol),
        seeds=tuple(range(10)),
    ),
    "paper-case-2": ExperimentPreset(
        name="paper-case-2",
        base=ScenarioConfig(tiers=TierScheme(m=0.2, b=0.3, alpha=3.0), max_rounds=PRESET_MAX_ROUNDS),
        protocols=tuple(Protocol),
        seeds=tuple(range(10)),
    ),
}
