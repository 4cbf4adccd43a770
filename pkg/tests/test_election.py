from fractions import Fraction

import numpy as np
import pytest

from wsnsim.election import (
    EpochState, TierProbabilities, derive_probabilities, elect_cluster_heads, election_threshold,
    epoch_length,
)
from wsnsim.netmodel import Tier, TierScheme


def test_case_one_probabilities():
    p = derive_probabilities(TierScheme(m=0.1, b=0.3, alpha=1.0, p_opt=0.1))
    assert p.p_nrm == pytest.approx(0.08, abs=1e-15)
    assert p.p_int == pytest.approx(0.12, abs=1e-15)
    assert p.p_adv == pytest.approx(0.16, abs=1e-15)
    assert p.for_tier(Tier.ADVANCED) == p.p_adv


def test_homogeneous_probabilities():
    # empty tiers still get their formula values, but only p_nrm is used
    p = derive_probabilities(TierScheme(m=0.0, b=0.0))
    assert p.p_nrm == 0.1


def test_epoch_lengths():
    assert epoch_length(0.1) == 10
    assert epoch_length(0.08) == 13  # 12.5 rounds half up
    assert epoch_length(0.12) == 8
    assert epoch_length(0.16) == 6
    assert epoch_length(1.0) == 1


def test_threshold_values():
    assert election_threshold(0.1, 0, True) == pytest.approx(0.1)
    assert election_threshold(0.1, 5, True) == pytest.approx(0.2)
    assert election_threshold(0.1, 9, True) == 1.0
    assert election_threshold(0.1, 13, True) == pytest.approx(0.1 / 0.7)
    assert election_threshold(0.1, 3, False) == 0.0


def test_threshold_monotone_within_epoch():
    t = [election_threshold(0.08, r, True) for r in range(13)]
    assert all(b > a for a, b in zip(t, t[1:]))
    assert t[-1] == 1.0


def test_bad_probabilities():
    with pytest.raises(ValueError):
        TierProbabilities(0.0, 0.1, 0.1)


def _state(tiers, scheme=TierScheme(m=0, b=0)):
    return EpochState(np.asarray(tiers), derive_probabilities(scheme))


def test_dead_and_ineligible_nodes_never_elected():
    ep = _state([0] * 10)
    alive = np.ones(10, bool)
    alive[3] = False
    ep.eligible[5] = False
    rng = np.random.default_rng(0)
    for _ in range(9):
        heads = elect_cluster_heads(alive, ep, rng)
        assert 3 not in heads and 5 not in heads


def test_each_node_elected_once_per_epoch():
    n = 30
    ep = _state([0] * n)
    rng = np.random.default_rng(1)
    alive = np.ones(n, bool)
    for _ in range(5):
        count = np.zeros(n, int)
        for _ in range(10):
            count[elect_cluster_heads(alive, ep, rng)] += 1
        assert (count == 1).all()


def test_tier_clocks_run_independently():
    scheme = TierScheme(m=0.1, b=0.3, alpha=1.0)
    tiers = np.array([0] * 6 + [1] * 3 + [2] * 1)
    ep = _state(tiers, scheme)
    assert ep.lengths.tolist() == [13, 8, 6]
    rng = np.random.default_rng(0)
    alive = np.ones(10, bool)
    for _ in range(6):
        elect_cluster_heads(alive, ep, rng)
    # the advanced epoch just wrapped, the others did not
    assert ep.clock.tolist() == [6, 6, 0]
    assert ep.eligible[9]


def test_probability_identity_exact_fractions():
    m, b, a = Fraction(1, 10), Fraction(3, 10), Fraction(1)
    mu, p = a / 2, Fraction(1, 10)
    d = 1 + m * a + b * mu
    assert (1 - m - b) * p / d + b * p * (1 + mu) / d + m * p * (1 + a) / d == p
