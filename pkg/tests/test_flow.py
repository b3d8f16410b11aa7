import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from bipswitch.bigraph import DegreeSequence, enumerate_realizations, havel_hakimi, valid_switches
from bipswitch.errors import DomainError
from bipswitch.flow import (
    ExcessProfile,
    FlowRep,
    agrees_outside,
    arc,
    build_buffer,
    buffer_width,
    enumerate_flows,
    excess_profile,
    feasible_flow,
    flow_representation,
    flow_to_realization,
    g_sequence,
    h0_sequence,
    halfgraph,
    hk_sequence,
)
from bipswitch.chain import sample_many

from conftest import LIMIT

TWO_SOURCES = DegreeSequence([7, 7, 6, 5, 4, 3, 3, 1], [1, 4, 3, 4, 5, 6, 7, 6])


def test_halfgraph():
    assert halfgraph(1).edges() == [(1, 1)]
    assert sorted(halfgraph(3).edges()) == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
    assert all(valid_switches(halfgraph(n)) == [] for n in range(1, 7))


def test_hk_sequence():
    assert hk_sequence(4, 0) == h0_sequence(4)
    assert hk_sequence(3, 1) == DegreeSequence([2, 2, 1], [1, 2, 2])
    with pytest.raises(DomainError):
        hk_sequence(3, 3)


def test_excess_profiles():
    assert excess_profile(h0_sequence(5)).k == 0
    ex = excess_profile(hk_sequence(6, 2))
    assert ex.sources == {("a", 1): 2} and ex.sinks == {("b", 6): 2}
    ex = excess_profile(TWO_SOURCES)
    assert ex.sources == {("a", 1): 1, ("b", 2): 2}
    assert ex.sinks == {("a", 7): 1, ("b", 8): 2}
    assert ex.k == 3


def test_two_source_flow():
    G = havel_hakimi(TWO_SOURCES)
    W = flow_representation(G)
    assert W.k == 3
    for u, v in W.directed_arcs():
        i, j = (u[1], v[1]) if u[0] == "a" else (v[1], u[1])
        assert (u, v) == arc(i, j)
    assert flow_to_realization(W) == G


def test_flow_examples():
    W = flow_representation(halfgraph(4))
    assert not W.arcs and W.k == 0
    assert flow_to_realization(FlowRep(4, frozenset(), ExcessProfile(4, {}))) == halfgraph(4)
    flows = enumerate_flows(3, excess_profile(hk_sequence(3, 1)))
    assert len(flows) == 5 == len(enumerate_realizations(hk_sequence(3, 1)))


def test_arcs_count_of_fn():
    n = 5
    arcs = {arc(i, j) for i in range(1, n + 1) for j in range(1, n + 1)}
    assert len(arcs) == n * n
    assert sum(1 for u, _ in arcs if u[0] == "a") == n * (n + 1) // 2


@pytest.mark.parametrize("n,k", [(4, 1), (5, 1), (5, 2), (6, 2), (6, 3)])
def test_bijection_cardinality(n, k):
    d = hk_sequence(n, k)
    reals = enumerate_realizations(d, LIMIT)
    reps = {flow_representation(G).arcs for G in reals}
    assert len(reps) == len(reals)
    assert reps == set(enumerate_flows(n, excess_profile(d)))


def test_feasible_flow_examples():
    assert not feasible_flow(4, lambda i, j: True, {}).flow.arcs
    res = feasible_flow(4, lambda i, j: True, excess_profile(hk_sequence(4, 1)))
    assert res and res.flow.k == 1
    # forbid every arc out of a1: a1 -> b_j needs 1 <= j, so block row 1
    res = feasible_flow(4, lambda i, j: i != 1, excess_profile(hk_sequence(4, 1)))
    assert not res and ("a", 1) in res.cut


def _nx_feasible(n, allowed, ex):
    G = nx.DiGraph()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if allowed(i, j):
                u, v = arc(i, j)
                G.add_edge(u, v, capacity=1)
    for v, x in ex.items():
        if x > 0:
            G.add_edge("s", v, capacity=x)
        elif x < 0:
            G.add_edge(v, "t", capacity=-x)
    need = sum(x for x in ex.values() if x > 0)
    if need == 0:
        return True
    if "s" not in G or "t" not in G:
        return False
    return nx.maximum_flow_value(G, "s", "t") == need


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 6), st.integers(1, 3), st.integers(0, 2**36 - 1))
def test_feasible_flow_matches_networkx(n, k, mask):
    if k >= n:
        k = n - 1
    ex = excess_profile(hk_sequence(n, k)).values
    allowed = lambda i, j: bool(mask >> ((i - 1) * 6 + (j - 1)) & 1)
    res = feasible_flow(n, allowed, ex)
    assert bool(res) == _nx_feasible(n, allowed, ex)
    if res:
        W = res.flow
        W.check()
        assert all(allowed(i, j) for i, j in W.arcs)


def test_buffer_width():
    assert buffer_width(1) == 5
    assert buffer_width(2) == 7


def test_buffer_trivial_and_domain():
    H = halfgraph(5)
    assert build_buffer(H, H, 1, 2) == H
    with pytest.raises(DomainError):
        build_buffer(H, H, 4, 3)


@pytest.mark.parametrize("k", [1, 2])
def test_buffer_random_pairs_n8(k):
    d = hk_sequence(8, k)
    z = buffer_width(k)
    samples = sample_many(d, 40, 4000, seed=k)
    for X, Y in zip(samples[::2], samples[1::2]):
        for i in range(0, 8 - z + 1):
            T = build_buffer(X, Y, i, z)
            assert T.degree_sequence() == d
            assert agrees_outside(T, Y, X, i, i + z)


def test_flowrep_json_roundtrip():
    W = flow_representation(enumerate_realizations(hk_sequence(4, 1))[3])
    assert FlowRep.from_dict(W.to_dict()) == W


def test_g_sequence():
    assert g_sequence(2) == DegreeSequence([1, 1, 3, 3], [3, 3, 1, 1])
