import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnsim.election import derive_probabilities, election_threshold, epoch_length
from wsnsim.netmodel import Network, ScenarioConfig, TierScheme, deploy_network
from wsnsim.protocols import form_clusters, steady_state_proactive, transmission_gate
from wsnsim.radio import RadioParams, tx_cost

R = RadioParams()


@st.composite
def schemes(draw):
    m = draw(st.floats(0.0, 1.0))
    b = draw(st.floats(0.0, 1.0 - m))
    alpha = draw(st.floats(0.0, 5.0))
    mu = draw(st.floats(0.0, alpha)) if alpha > 0 else 0.0
    p = draw(st.floats(0.01, 0.1))
    return TierScheme(m=m, b=b, alpha=alpha, mu=mu, p_opt=p)


@given(schemes())
def test_weighted_probabilities_sum_to_p_opt(t):
    p = derive_probabilities(t)
    total = (1 - t.m - t.b) * p.p_nrm + t.b * p.p_int + t.m * p.p_adv
    assert abs(total - t.p_opt) < 1e-12
    assert p.p_nrm <= p.p_int <= p.p_adv


@given(st.floats(0.01, 1.0), st.integers(0, 500))
def test_threshold_is_a_probability(p, r):
    t = election_threshold(p, r, True)
    assert p - 1e-15 <= t <= 1.0
    assert election_threshold(p, epoch_length(p) - 1, True) == 1.0 or epoch_length(p) * p < 1 - 1e-9


@given(st.integers(1, 8000), st.floats(0.0, 300.0), st.floats(0.0, 300.0))
def test_tx_cost_monotone_in_distance(bits, d1, d2):
    lo, hi = sorted((d1, d2))
    assert tx_cost(R, bits, lo) <= tx_cost(R, bits, hi)


@given(st.floats(-100, 200), st.floats(-100, 200) | st.just(math.nan), st.floats(0, 100), st.floats(0, 20))
def test_gate_requires_hard_threshold(v, sv, hard, soft):
    if transmission_gate(v, sv, hard, soft):
        assert v >= hard
        assert math.isnan(sv) or abs(v - sv) >= soft


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31), st.lists(st.integers(0, 39), max_size=6))
def test_every_alive_node_is_head_member_or_unclustered(n, seed, heads):
    net = deploy_network(ScenarioConfig(n=n, rng_seed=seed))
    heads = [h for h in heads if h < n]
    a = form_clusters(net, heads, R, 141.0)
    covered = np.concatenate([a.heads, a.members, a.unclustered])
    assert sorted(covered.tolist()) == np.flatnonzero(net.alive).tolist()
    if len(a.heads):
        d = net.dist[a.members][:, a.heads].min(axis=1)
        assert np.allclose(d, net.dist[a.members, a.head_of])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**31), st.floats(1e-5, 0.01))
def test_energy_is_conserved_in_a_round(n, seed, e0):
    net = deploy_network(ScenarioConfig(n=n, rng_seed=seed, e0=e0))
    start = net.residual.sum()
    a = form_clusters(net, np.arange(0, n, 3), R, 141.0)
    steady_state_proactive(net, a, R)
    assert abs((start - net.residual.sum()) - net.spent) < 1e-12
    assert (net.residual >= 0).all()
    assert (net.alive == (net.residual > 0)).all()
