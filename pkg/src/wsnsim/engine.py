"""Simulation driver, run summaries and cross-protocol comparison."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .election import EpochState, derive_probabilities
from .field import Field
from .netmodel import Network, Protocol, ScenarioConfig, deploy_network
from .protocols import RoundRecord, run_round

__all__ = [
    "RoundRecord", "RunSummary", "Comparison", "run_scenario", "simulate",
    "run_ensemble", "summarize_comparison",
]

HISTORY_DTYPE = np.dtype([
    ("round", np.int32),
    ("alive", np.int32),
    ("dead", np.int32),
    ("ch_count", np.int32),
    ("packets_round", np.int32),
    ("packets_cum", np.int64),
    ("residual_energy", np.float64),
])


@dataclass
class RunSummary:
    """Outcome of one simulation run.

    Round-valued fields count rounds completed before the event, i.e. the
    zero-based index of the round in which it happened.  Events that never
    happened are ``None``.  ``network_lifetime`` falls back to ``max_rounds``
    when nodes are still alive at the end.
    """

    config: ScenarioConfig
    stability_period: int | None
    instability_period: int | None
    network_lifetime: int
    half_dead_round: int | None
    total_packets: int
    history: np.ndarray
    initial_energy: float
    energy_spent: float
    final_residual: float

    @property
    def per_round(self) -> list[RoundRecord]:
        return [RoundRecord(*(row.item() for row in rec)) for rec in self.history]

    @property
    def all_dead(self) -> bool:
        return bool(len(self.history)) and int(self.history["alive"][-1]) == 0

    @property
    def seed(self) -> int:
        return self.config.rng_seed

    def scalars(self) -> dict:
        return {
            "protocol": self.config.protocol.value,
            "seed": self.seed,
            "rounds": len(self.history),
            "stability_period": self.stability_period,
            "instability_period": self.instability_period,
            "network_lifetime": self.network_lifetime,
            "half_dead_round": self.half_dead_round,
            "total_packets": self.total_packets,
            "initial_energy": self.initial_energy,
            "energy_spent": self.energy_spent,
        }

    def same_as(self, other: RunSummary) -> bool:
        """Bit-identical histories and scalars."""
        return (self.history.tobytes() == other.history.tobytes()
                and self.scalars() == other.scalars())


def simulate(config: ScenarioConfig, net: Network) -> RunSummary:
    """Run ``config`` on an already deployed network until it dies out."""
    streams = config.streams()
    rng = np.random.default_rng(streams["election"])
    protocol = config.protocol
    probs = derive_probabilities(config.effective_tiers)
    epoch = EpochState(net.tier, probs)
    field = None
    if protocol.reactive:
        field_seed = int(streams["field"].generate_state(1, np.uint64)[0])
        field = Field(config.field_model, field_seed, len(net))

    initial = float(math.fsum(net.initial))
    rows = []
    cum = 0
    for r in range(config.max_rounds):
        rec = run_round(protocol, net, epoch, config.radio, round_index=r, rng=rng,
                        d_max=config.d_max, reactive=config.reactive, field=field,
                        frames_per_round=config.frames_per_round, packets_before=cum)
        cum = rec.packets_cum
        rows.append((rec.round, rec.alive, rec.dead, rec.ch_count, rec.packets_round,
                     rec.packets_cum, rec.residual_energy))
        if rec.alive == 0:
            break
    history = np.array(rows, dtype=HISTORY_DTYPE)
    return _summarize(config, history, initial, net)


def _first_round(history: np.ndarray, mask: np.ndarray) -> int | None:
    hit = np.flatnonzero(mask)
    return int(history["round"][hit[0]]) if len(hit) else None


def _summarize(config: ScenarioConfig, history: np.ndarray, initial: float, net: Network) -> RunSummary:
    n = config.n
    dead = history["dead"]
    first = _first_round(history, dead >= 1)
    last = _first_round(history, dead >= n)
    half = _first_round(history, dead >= math.ceil(n / 2))
    lifetime = last if last is not None else config.max_rounds
    instability = lifetime - first if (first is not None and last is not None) else None
    return RunSummary(
        config=config,
        stability_period=first,
        instability_period=instability,
        network_lifetime=lifetime,
        half_dead_round=half,
        total_packets=int(history["packets_cum"][-1]),
        history=history,
        initial_energy=initial,
        energy_spent=net.spent,
        final_residual=float(math.fsum(net.residual)),
    )


def run_scenario(config: ScenarioConfig) -> RunSummary:
    """Deploy the network for ``config`` and simulate it."""
    return simulate(config, deploy_network(config))


def run_ensemble(config: ScenarioConfig, seeds, workers: int = 1) -> list[RunSummary]:
    """One run per seed, returned in seed order."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seed list is empty")
    configs = [config.with_seed(s) for s in seeds]
    if workers <= 1 or len(configs) == 1:
        return [run_scenario(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_scenario, configs))


def _stats(values) -> tuple[float, float, int]:
    vals = [v for v in values if v is not None]
    if not vals:
        return math.nan, math.nan, 0
    arr = np.asarray(vals, dtype=float)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), sd, len(arr)


@dataclass
class ComparisonRow:
    protocol: str
    runs: int
    stability_mean: float
    stability_sd: float
    stability_runs: int
    lifetime_mean: float
    lifetime_sd: float
    packets_mean: float
    packets_sd: float


@dataclass
class Comparison:
    rows: list[ComparisonRow]
    # (metric, a, b) -> (mean_a > mean_b, mean-sd of a above mean+sd of b)
    ordering: dict[tuple[str, str, str], tuple[bool, bool]]

    def row(self, protocol) -> ComparisonRow:
        name = protocol.value if isinstance(protocol, Protocol) else str(protocol)
        for row in self.rows:
            if row.protocol == name:
                return row
        raise KeyError(name)

    def to_text(self) -> str:
        head = (f"{'protocol':<8} {'runs':>4} {'stability':>20} {'lifetime':>20} {'packets':>22}")
        lines = [head, "-" * len(head)]
        for r in self.rows:
            if math.isnan(r.stability_mean):
                stab = f"{'n/a':>11}   {'':<6}"
            else:
                stab = f"{r.stability_mean:>11.1f} ± {r.stability_sd:<6.1f}"
            lines.append(
                f"{r.protocol:<8} {r.runs:>4} {stab} "
                f"{r.lifetime_mean:>11.1f} ± {r.lifetime_sd:<6.1f} "
                f"{r.packets_mean:>12.1f} ± {r.packets_sd:<7.1f}"
            )
        return "\n".join(lines)

    def to_records(self) -> list[dict]:
        return [dataclasses.asdict(r) for r in self.rows]


def _base_key(config: ScenarioConfig) -> ScenarioConfig:
    return dataclasses.replace(config, protocol=Protocol.LEACH, reactive=None, rng_seed=0)


def summarize_comparison(summaries: dict) -> Comparison:
    """Per-protocol mean and sample standard deviation plus pairwise orderings.

    All runs must share one base scenario; only protocol, seed and the
    reactive block (which only reactive protocols carry) may differ.
    """
    if not summaries:
        raise ValueError("no summaries to compare")
    bases = {_base_key(s.config) for runs in summaries.values() for s in runs}
    reactive = {s.config.reactive for runs in summaries.values() for s in runs} - {None}
    if len(bases) > 1 or len(reactive) > 1:
        raise ValueError("summaries come from different base scenarios")

    rows = []
    for proto, runs in summaries.items():
        if not runs:
            raise ValueError(f"no runs for {proto}")
        name = proto.value if isinstance(proto, Protocol) else str(proto)
        st_mean, st_sd, st_n = _stats(s.stability_period for s in runs)
        lt_mean, lt_sd, _ = _stats(s.network_lifetime for s in runs)
        pk_mean, pk_sd, _ = _stats(s.total_packets for s in runs)
        rows.append(ComparisonRow(name, len(runs), st_mean, st_sd, st_n,
                                  lt_mean, lt_sd, pk_mean, pk_sd))

    ordering = {}
    metrics = {"stability": ("stability_mean", "stability_sd"),
               "lifetime": ("lifetime_mean", "lifetime_sd"),
               "packets": ("packets_mean", "packets_sd")}
    for metric, (mean_f, sd_f) in metrics.items():
        for a in rows:
            for b in rows:
                if a is b:
                    continue
                ma, sa = getattr(a, mean_f), getattr(a, sd_f)
                mb, sb = getattr(b, mean_f), getattr(b, sd_f)
                ordering[(metric, a.protocol, b.protocol)] = (bool(ma > mb), bool(ma - sa > mb + sb))
    return Comparison(rows, ordering)
