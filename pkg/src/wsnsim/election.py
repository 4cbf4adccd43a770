"""Tier-weighted cluster-head election with rotating thresholds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netmodel import Tier, TierScheme, round_half_up


@dataclass(frozen=True)
class TierProbabilities:
    p_nrm: float
    p_int: float
    p_adv: float

    def __post_init__(self):
        for p in (self.p_nrm, self.p_int, self.p_adv):
            if not 0.0 < p <= 1.0:
                raise ValueError(f"election probability {p} outside (0, 1]")

    def as_array(self) -> np.ndarray:
        """Probabilities indexed by :class:`Tier` value."""
        return np.array([self.p_nrm, self.p_int, self.p_adv])

    def for_tier(self, tier: Tier) -> float:
        return float(self.as_array()[int(tier)])


def derive_probabilities(tiers: TierScheme) -> TierProbabilities:
    """Split ``p_opt`` across tiers in proportion to initial energy."""
    denom = tiers.energy_factor
    return TierProbabilities(
        p_nrm=tiers.p_opt / denom,
        p_int=tiers.p_opt * (1.0 + tiers.mu) / denom,
        p_adv=tiers.p_opt * (1.0 + tiers.alpha) / denom,
    )


def epoch_length(p: float) -> int:
    """Rounds per election epoch for probability ``p``: ``round(1/p)``."""
    return max(1, round_half_up(1.0 / p))


def election_threshold(p: float, r: int, eligible: bool) -> float:
    """Rotating threshold for a node at round ``r`` of its epoch clock.

    Returns ``p / (1 - p*(r mod L))`` with ``L = epoch_length(p)`` for an
    eligible node and 0 otherwise.  Values at or above 1 (up to float noise)
    are reported as exactly 1.
    """
    if not eligible:
        return 0.0
    t = p / (1.0 - p * (r % epoch_length(p)))
    return 1.0 if t >= 1.0 - 1e-9 else t


class EpochState:
    """Eligibility sets and per-tier epoch clocks.

    Each tier runs its own clock of ``epoch_length(p_tier)`` rounds.  A node
    that serves as cluster head leaves its tier's eligible set until that
    tier's epoch ends, when the whole tier becomes eligible again.
    """

    def __init__(self, tiers, probs: TierProbabilities):
        self.tier = np.asarray(tiers, dtype=int)
        self.p = probs.as_array()
        self.lengths = np.array([epoch_length(p) for p in self.p])
        self.clock = np.zeros(3, dtype=int)
        self.eligible = np.ones(len(self.tier), dtype=bool)
        self._members = [self.tier == t for t in range(3)]
        self._table = [[election_threshold(p, r, True) for r in range(n)]
                       for p, n in zip(self.p, self.lengths)]

    @property
    def positions(self) -> np.ndarray:
        """Per-node round position within the current tier epoch."""
        return self.clock[self.tier]

    def thresholds(self, alive) -> np.ndarray:
        """Current threshold of every node (0 for dead or ineligible nodes)."""
        c = self.clock
        per_tier = np.array([self._table[0][c[0]], self._table[1][c[1]], self._table[2][c[2]]])
        t = per_tier[self.tier]
        t[~(self.eligible & alive)] = 0.0
        return t

    def advance(self) -> None:
        self.clock += 1
        done = self.clock >= self.lengths
        if done.any():
            for t in np.flatnonzero(done):
                self.clock[t] = 0
                self.eligible[self._members[t]] = True


def elect_cluster_heads(alive, epoch: EpochState, rng: np.random.Generator) -> np.ndarray:
    """Run one election round and return the sorted ids of the new heads.

    One uniform draw is made per node every round whether or not it is
    eligible, so the random stream does not depend on network state.  The
    epoch clocks advance afterwards.
    """
    alive = np.asarray(alive, dtype=bool)
    u = rng.random(len(alive))
    heads = np.flatnonzero(u < epoch.thresholds(alive))
    epoch.eligible[heads] = False
    epoch.advance()
    return heads
