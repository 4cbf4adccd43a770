"""Nodes, heterogeneity tiers, scenario configuration and deployment."""

from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .field import FieldModel
from .radio import DeadNodeError, RadioParams

if TYPE_CHECKING:
    from .protocols import ReactiveConfig


class ConfigError(ValueError):
    """A scenario or config file violates one of the model invariants."""


def round_half_up(x: float) -> int:
    # the epsilon absorbs float noise such as 0.1 * 100 == 10.000000000000002
    return int(math.floor(x + 0.5 + 1e-9))


class Position(NamedTuple):
    x: float
    y: float


class Tier(enum.IntEnum):
    NORMAL = 0
    INTERMEDIATE = 1
    ADVANCED = 2


@dataclass(frozen=True)
class TierScheme:
    """Fractions and energy multipliers of the three node tiers.

    ``m`` advanced nodes start with ``E_o*(1+alpha)``, ``b`` intermediate
    nodes with ``E_o*(1+mu)`` and the rest with ``E_o``.  ``mu`` defaults to
    ``alpha/2``.
    """

    m: float = 0.1
    b: float = 0.3
    alpha: float = 1.0
    mu: float | None = None
    p_opt: float = 0.1

    def __post_init__(self):
        if self.mu is None:
            object.__setattr__(self, "mu", self.alpha / 2)
        if not (0.0 <= self.m <= 1.0 and 0.0 <= self.b <= 1.0):
            raise ConfigError("tier fractions m and b must lie in [0, 1]")
        if self.m + self.b > 1.0 + 1e-12:
            raise ConfigError(f"m + b must not exceed 1 (got m={self.m}, b={self.b})")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if not 0.0 <= self.mu <= self.alpha:
            raise ConfigError(f"mu must satisfy 0 <= mu <= alpha (got mu={self.mu}, alpha={self.alpha})")
        if not 0.0 < self.p_opt <= 1.0:
            raise ConfigError("p_opt must lie in (0, 1]")

    @property
    def energy_factor(self) -> float:
        """``1 + m*alpha + b*mu``: total energy relative to a homogeneous network."""
        return 1.0 + self.m * self.alpha + self.b * self.mu

    def multiplier(self, tier: Tier) -> float:
        return {Tier.NORMAL: 1.0, Tier.INTERMEDIATE: 1.0 + self.mu, Tier.ADVANCED: 1.0 + self.alpha}[tier]


class Protocol(str, enum.Enum):
    LEACH = "LEACH"
    SEP = "SEP"
    ESEP = "ESEP"
    TEEN = "TEEN"
    TSEP = "TSEP"

    @property
    def reactive(self) -> bool:
        return self in (Protocol.TEEN, Protocol.TSEP)

    @property
    def tier_count(self) -> int:
        return {"LEACH": 1, "TEEN": 1, "SEP": 2, "ESEP": 3, "TSEP": 3}[self.value]

    def restrict(self, tiers: TierScheme) -> TierScheme:
        """The tier scheme this protocol actually runs with."""
        if self.tier_count == 1:
            return dataclasses.replace(tiers, m=0.0, b=0.0)
        if self.tier_count == 2:
            return dataclasses.replace(tiers, b=0.0)
        return tiers

    @classmethod
    def parse(cls, name: str) -> Protocol:
        try:
            return cls(name.upper())
        except ValueError:
            raise ConfigError(f"unknown protocol {name!r}; expected one of "
                              + ", ".join(p.value for p in cls)) from None


@dataclass(frozen=True)
class Node:
    id: int
    pos: Position
    tier: Tier
    initial_energy: float
    residual_energy: float
    alive: bool = True
    was_ch_this_epoch: bool = False
    sensed_value_memory: float | None = None
    rounds_since_epoch_start: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    n: int = 100
    field_side: float = 100.0
    bs_position: Position | None = None
    tiers: TierScheme = field(default_factory=TierScheme)
    e0: float = 0.5
    radio: RadioParams = field(default_factory=RadioParams)
    reactive: ReactiveConfig | None = None
    field_model: FieldModel = field(default_factory=FieldModel)
    protocol: Protocol = Protocol.LEACH
    max_rounds: int = 10000
    rng_seed: int = 0
    frames_per_round: int = 1
    immortal: bool = False

    def __post_init__(self):
        if self.bs_position is None:
            object.__setattr__(self, "bs_position", Position(self.field_side / 2, self.field_side / 2))
        else:
            object.__setattr__(self, "bs_position", Position(*self.bs_position))
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be at least 1")
        if self.frames_per_round < 1:
            raise ConfigError("frames_per_round must be at least 1")
        if not self.field_side > 0:
            raise ConfigError("field_side must be positive")
        if not self.e0 > 0:
            raise ConfigError("e0 must be positive")
        if self.protocol.reactive != (self.reactive is not None):
            raise ConfigError(f"a reactive block is required for exactly the reactive protocols "
                              f"(TEEN, TSEP); got protocol {self.protocol.value} with "
                              f"reactive={'set' if self.reactive is not None else 'unset'}")
        tiers = self.effective_tiers
        if round_half_up(tiers.m * self.n) + round_half_up(tiers.b * self.n) > self.n:
            raise ConfigError("round(m*n) + round(b*n) exceeds n")

    @property
    def effective_tiers(self) -> TierScheme:
        return self.protocol.restrict(self.tiers)

    @property
    def d_max(self) -> float:
        """Field diagonal, the range of a cluster-head advertisement."""
        return self.field_side * math.sqrt(2.0)

    def for_protocol(self, protocol: Protocol | str) -> ScenarioConfig:
        """Copy of this config running ``protocol``.

        Reactive protocols keep an existing reactive block or get the default
        one; proactive protocols drop it.
        """
        from .protocols import ReactiveConfig

        protocol = Protocol.parse(protocol) if isinstance(protocol, str) else protocol
        if protocol.reactive:
            reactive = self.reactive if self.reactive is not None else ReactiveConfig()
        else:
            reactive = None
        return dataclasses.replace(self, protocol=protocol, reactive=reactive)

    def with_seed(self, seed: int) -> ScenarioConfig:
        return dataclasses.replace(self, rng_seed=seed)

    def streams(self) -> dict[str, np.random.SeedSequence]:
        """Independent per-purpose seed sequences derived from ``rng_seed``."""
        names = ("placement", "election", "field")
        return {name: np.random.SeedSequence(self.rng_seed, spawn_key=(k,)) for k, name in enumerate(names)}


class LinkCosts:
    """Precomputed transmission costs between nodes and to the base station."""

    def __init__(self, radio: RadioParams, dist: np.ndarray, d_bs: np.ndarray):
        from .radio import rx_cost, tx_cost

        self.radio = radio
        k, ctrl = radio.packet_bits, radio.ctrl_bits
        self.data = tx_cost(radio, k, dist)
        self.data_bs = tx_cost(radio, k, d_bs)
        self.join = rx_cost(radio, ctrl) + tx_cost(radio, ctrl, dist)


class Network(Sequence):
    """Mutable array-backed state of a deployed network.

    Indexing yields immutable :class:`Node` snapshots.  ``spent`` is the
    running total of energy actually drained from batteries.
    """

    def __init__(self, positions, tiers, initial_energy, bs_position, field_side: float, immortal: bool = False):
        self.pos = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.tier = np.asarray(tiers, dtype=int)
        self.initial = np.asarray(initial_energy, dtype=float).copy()
        self.residual = self.initial.copy()
        self.alive = np.ones(len(self.initial), dtype=bool)
        self.sv = np.full(len(self.initial), np.nan)
        self.death_round = np.full(len(self.initial), -1)
        self.current_round = 0
        self.n_alive = len(self.initial)
        self.bs = Position(*bs_position)
        self.field_side = field_side
        self.immortal = immortal
        self.spent = 0.0
        self.d_bs = np.hypot(self.pos[:, 0] - self.bs.x, self.pos[:, 1] - self.bs.y)
        diff = self.pos[:, None, :] - self.pos[None, :, :]
        self.dist = np.hypot(diff[..., 0], diff[..., 1])

    def link_costs(self, radio: RadioParams) -> LinkCosts:
        """Per-link radio costs for this (static) deployment, cached per radio."""
        cached = getattr(self, "_link_costs", None)
        if cached is None or cached.radio != radio:
            cached = self._link_costs = LinkCosts(radio, self.dist, self.d_bs)
        return cached

    @classmethod
    def from_nodes(cls, nodes, bs_position, field_side: float) -> Network:
        nodes = sorted(nodes, key=lambda nd: nd.id)
        net = cls([nd.pos for nd in nodes], [int(nd.tier) for nd in nodes],
                  [nd.initial_energy for nd in nodes], bs_position, field_side)
        net.residual[:] = [nd.residual_energy for nd in nodes]
        net.alive[:] = [nd.alive for nd in nodes]
        net.n_alive = int(net.alive.sum())
        net.sv[:] = [np.nan if nd.sensed_value_memory is None else nd.sensed_value_memory for nd in nodes]
        return net

    def __len__(self):
        return len(self.initial)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(len(self))[i]]
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        i %= len(self)
        sv = self.sv[i]
        return Node(
            id=i,
            pos=Position(float(self.pos[i, 0]), float(self.pos[i, 1])),
            tier=Tier(int(self.tier[i])),
            initial_energy=float(self.initial[i]),
            residual_energy=float(self.residual[i]),
            alive=bool(self.alive[i]),
            sensed_value_memory=None if np.isnan(sv) else float(sv),
        )

    def charge_at(self, idx, costs) -> None:
        """Drain ``costs`` (scalar or per-node) from the distinct nodes ``idx``.

        Every cost is applied in full; nodes that cannot cover it end at zero
        energy and die, stamped with ``current_round``.
        """
        if len(idx) == 0:
            return
        if not self.alive[idx].all():
            bad = np.asarray(idx)[~self.alive[idx]]
            raise DeadNodeError(f"charging dead node(s) {bad.tolist()}")
        scalar = np.ndim(costs) == 0
        if self.immortal:
            self.spent += float(costs) * len(idx) if scalar else float(np.sum(costs))
            return
        before = self.residual[idx]
        after = before - costs
        dies = after <= 0
        if dies.any():
            drained = np.where(dies, before, costs)
            self.spent += float(drained.sum())
            self.residual[idx] = np.where(dies, 0.0, after)
            dead = np.asarray(idx)[dies]
            self.alive[dead] = False
            self.death_round[dead] = self.current_round
            self.n_alive -= len(dead)
        else:
            self.spent += float(costs) * len(idx) if scalar else float(np.sum(costs))
            self.residual[idx] = after

    def charge(self, costs) -> None:
        """Drain a length-n array of per-node costs; zero entries are skipped."""
        costs = np.asarray(costs, dtype=float)
        hit = np.flatnonzero(costs > 0)
        self.charge_at(hit, costs[hit])


def tier_counts(tiers: TierScheme, n: int) -> tuple[int, int, int]:
    """(normal, intermediate, advanced) node counts for ``n`` nodes."""
    adv = round_half_up(tiers.m * n)
    inter = round_half_up(tiers.b * n)
    if adv + inter > n:
        raise ConfigError("round(m*n) + round(b*n) exceeds n")
    return n - adv - inter, inter, adv


def deploy_network(config: ScenarioConfig, rng: np.random.Generator | None = None) -> Network:
    """Scatter ``config.n`` nodes uniformly over the square field.

    Tier counts are exact: ``round(m*n)`` advanced and ``round(b*n)``
    intermediate nodes (using the protocol's effective tier scheme), chosen
    by a random permutation.  With no ``rng`` the placement stream of
    ``config.rng_seed`` is used.
    """
    if rng is None:
        rng = np.random.default_rng(config.streams()["placement"])
    n = config.n
    tiers = config.effective_tiers
    positions = rng.uniform(0.0, config.field_side, size=(n, 2))
    order = rng.permutation(n)
    _, inter, adv = tier_counts(tiers, n)
    tier = np.full(n, int(Tier.NORMAL))
    tier[order[:adv]] = Tier.ADVANCED
    tier[order[adv:adv + inter]] = Tier.INTERMEDIATE
    mult = np.array([tiers.multiplier(t) for t in Tier])
    initial = config.e0 * mult[tier]
    return Network(positions, tier, initial, config.bs_position, config.field_side, immortal=config.immortal)


def total_initial_energy(nodes) -> float:
    if isinstance(nodes, Network):
        if len(nodes) == 0:
            raise ValueError("empty network")
        return float(math.fsum(nodes.initial))
    nodes = list(nodes)
    if not nodes:
        raise ValueError("empty node list")
    return math.fsum(nd.initial_energy for nd in nodes)
