"""Per-round protocol behaviour: cluster formation and steady-state data flow.

A round is election, cluster formation, then ``frames_per_round`` frames of
data transfer.  Proactive protocols (LEACH, SEP, ESEP) send a packet from
every node every frame.  Reactive protocols (TEEN, TSEP) send only when the
sensed value passes the hard threshold and differs from the last sent value
by at least the soft threshold.

Within a frame energy is charged in three phases: node transmissions, then
cluster-head reception and aggregation, then cluster-head uplink.  A node that
dies in one phase takes no part in later ones; a transmission that kills its
sender still counts as sent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .election import EpochState, elect_cluster_heads
from .field import Field
from .netmodel import Network, Protocol
from .radio import RadioParams, aggregation_cost, rx_cost, tx_cost

ProtocolKind = Protocol


@dataclass(frozen=True)
class ReactiveConfig:
    hard_threshold: float = 50.0
    soft_threshold: float = 2.0
    attributes: tuple[str, ...] = ("temperature",)
    # report time, in frames; the simulator reports once per frame
    report_time: int = 1

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not np.isfinite(self.hard_threshold):
            raise ValueError("hard_threshold must be finite")
        if self.soft_threshold < 0:
            raise ValueError("soft_threshold must be non-negative")
        if not self.attributes:
            raise ValueError("attributes must not be empty")
        if self.report_time < 1:
            raise ValueError("report_time must be at least 1")


@dataclass
class ClusterAssignment:
    heads: np.ndarray                      # surviving cluster heads, ascending
    members: np.ndarray                    # member node ids
    head_of: np.ndarray                    # cluster head of each member
    unclustered: np.ndarray                # alive non-heads with no head to join
    elected: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    # per node: its head for members, itself for heads, -1 otherwise
    parent: np.ndarray | None = None

    @property
    def mapping(self) -> dict[int, int]:
        return dict(zip(self.members.tolist(), self.head_of.tolist()))


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alive: int
    dead: int
    ch_count: int
    packets_round: int
    packets_cum: int
    residual_energy: float


def transmission_gate(value, sv, hard: float, soft: float):
    """True where a reading may be transmitted.

    ``sv`` is the last transmitted value, NaN if the node never transmitted.
    """
    value = np.asarray(value, dtype=float)
    sv = np.asarray(sv, dtype=float)
    with np.errstate(invalid="ignore"):
        return (value >= hard) & (np.isnan(sv) | (np.abs(value - sv) >= soft))


def form_clusters(net: Network, ch_ids, radio: RadioParams, d_max: float) -> ClusterAssignment:
    """Advertise the elected heads and attach every other alive node to the nearest.

    Each head pays one control broadcast over ``d_max``; each joining node
    pays one control reception plus a join message to its head.  Ties go to
    the head with the lower id.  With no surviving head every alive node is
    left unclustered.
    """
    elected = np.asarray(ch_ids, dtype=int)
    elected = np.unique(elected[net.alive[elected]])
    ctrl = radio.ctrl_bits
    if ctrl > 0 and len(elected):
        net.charge_at(elected, tx_cost(radio, ctrl, float(d_max)))
    heads = elected[net.alive[elected]]
    candidates = net.alive.copy()
    candidates[elected] = False
    others = np.flatnonzero(candidates)

    parent = np.full(len(net), -1)
    if len(heads) == 0:
        empty = np.empty(0, dtype=int)
        return ClusterAssignment(heads, empty, empty, others, elected, parent)
    nearest = np.argmin(net.dist[heads], axis=0)
    head_of = heads[nearest[others]]
    if ctrl > 0 and len(others):
        net.charge_at(others, net.link_costs(radio).join[head_of, others])
    parent[heads] = heads
    parent[others] = head_of
    return ClusterAssignment(heads, others, head_of, np.empty(0, dtype=int), elected, parent)


def _frame(net: Network, assign: ClusterAssignment, radio: RadioParams, has_data: np.ndarray) -> int:
    """One frame of data transfer from the alive nodes flagged in ``has_data``."""
    k = radio.packet_bits
    links = net.link_costs(radio)
    src = np.flatnonzero(has_data)
    if len(src) == 0:
        return 0
    par = assign.parent[src]
    is_head = par == src
    member = (par >= 0) & ~is_head
    member[member] = net.alive[par[member]]
    senders = src[member]
    direct = src[~member & ~is_head]
    targets = par[member]

    if len(senders):
        net.charge_at(senders, links.data[senders, targets])
    if len(direct):
        net.charge_at(direct, links.data_bs[direct])
    packets = len(direct)

    signals = np.bincount(targets, minlength=len(net))
    signals[src[is_head]] += 1
    heads = np.flatnonzero(signals)
    if len(heads) == 0:
        return packets
    signals = signals[heads]
    received = signals - has_data[heads]
    net.charge_at(heads, rx_cost(radio, k) * received + aggregation_cost(radio, k, signals))
    heads = heads[net.alive[heads]]
    if len(heads):
        net.charge_at(heads, links.data_bs[heads])
    return packets + len(heads)


def steady_state_proactive(net: Network, assign: ClusterAssignment, radio: RadioParams,
                           frames_per_round: int = 1) -> int:
    """Every alive node reports every frame; returns packets delivered to the BS.

    Members send to their head, heads aggregate everything received plus their
    own reading and send one packet to the BS.  Nodes with no head (or whose
    head died) send straight to the BS.
    """
    return sum(_frame(net, assign, radio, net.alive.copy()) for _ in range(frames_per_round))


def steady_state_reactive(net: Network, assign: ClusterAssignment, radio: RadioParams,
                          reactive: ReactiveConfig, field: Field, round_index: int,
                          frames_per_round: int = 1, trace: list | None = None) -> int:
    """Threshold-gated reporting; returns packets delivered to the BS.

    Every alive node, heads included, senses once per frame and transmits when
    :func:`transmission_gate` allows it, remembering the sent value.  A head
    forwards one aggregate only in frames where it has something to report.
    ``trace``, when given, collects ``(tick, readings, sv_before, fired)``.
    """
    packets = 0
    for f in range(frames_per_round):
        tick = round_index * frames_per_round + f
        value = field.readings(tick)
        if trace is None and not (value >= reactive.hard_threshold).any():
            continue
        fire = net.alive & transmission_gate(value, net.sv, reactive.hard_threshold,
                                             reactive.soft_threshold)
        if trace is not None:
            trace.append((tick, value.copy(), net.sv.copy(), fire.copy()))
        if not fire.any():
            continue
        net.sv[fire] = value[fire]
        packets += _frame(net, assign, radio, fire)
    return packets


def run_round(protocol: Protocol, net: Network, epoch: EpochState, radio: RadioParams, *,
              round_index: int, rng: np.random.Generator, d_max: float,
              reactive: ReactiveConfig | None = None, field: Field | None = None,
              frames_per_round: int = 1, packets_before: int = 0) -> RoundRecord:
    """Elect, form clusters, run the steady state and snapshot the metrics."""
    net.current_round = round_index
    heads = elect_cluster_heads(net.alive, epoch, rng)
    assign = form_clusters(net, heads, radio, d_max)
    if radio.e_sense > 0:
        net.charge_at(np.flatnonzero(net.alive), float(radio.e_sense))
    if protocol.reactive:
        if reactive is None or field is None:
            raise ValueError(f"{protocol.value} needs a reactive config and a field")
        packets = steady_state_reactive(net, assign, radio, reactive, field, round_index, frames_per_round)
    else:
        packets = steady_state_proactive(net, assign, radio, frames_per_round)

    alive = net.n_alive
    return RoundRecord(
        round=round_index,
        alive=alive,
        dead=len(net) - alive,
        ch_count=len(heads),
        packets_round=packets,
        packets_cum=packets_before + packets,
        residual_energy=float(net.residual.sum()),
    )
