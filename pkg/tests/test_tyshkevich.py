import itertools
from math import ceil

import pytest
from hypothesis import given, settings

from bipswitch.bigraph import DegreeSequence, Realization, enumerate_realizations, valid_switches
from bipswitch.errors import CycleNotShortest
from bipswitch.flow import g_sequence, h0_sequence, halfgraph, hk_sequence
from bipswitch.tyshkevich import (
    all_s2_graphic,
    compose,
    compose_sequences,
    count_via_components,
    decompose,
    extract_induced_halfgraph,
    find_alternating_cycle,
    induced,
    is_covered_by_alternating_cycles,
    is_decomposable,
    psi_inverse,
    s2_neighbors,
)

from conftest import LIMIT, realizations

K2 = Realization.from_edges(1, 1, [(1, 1)])


def test_compose_examples():
    assert compose(K2, K2) == halfgraph(2)
    H = enumerate_realizations(hk_sequence(3, 1))[2]
    assert compose(Realization.empty(0, 0), H) == H
    G = Realization.from_edges(2, 1, [(1, 1)])
    C = compose(G, H)
    assert C.degA()[:2] == (1 + H.nB, 0 + H.nB)
    assert compose_sequences(G.degree_sequence(), H.degree_sequence()) == C.degree_sequence()


def test_is_decomposable_examples():
    assert is_decomposable(DegreeSequence([1], [1])) == (1, 0)
    assert is_decomposable(h0_sequence(4)) is not None
    for n in range(2, 9):
        for k in range(1, n):
            assert is_decomposable(hk_sequence(n, k)) is None


def test_decompose_examples():
    assert [len(decompose(h0_sequence(n)).components) for n in range(1, 6)] == [2, 4, 6, 8, 10]
    rep = decompose(g_sequence(3))
    assert rep.components == (DegreeSequence([1, 1], [1, 1]),) * 3
    assert [list(p) for p in rep.split_points] == [[2, 2], [4, 4]]
    d = hk_sequence(5, 2)
    assert decompose(d).components == (d.sorted(),)


@settings(max_examples=150, deadline=None)
@given(realizations(max_side=5))
def test_decompose_properties(G):
    d = G.degree_sequence()
    rep = decompose(d)
    assert rep.recompose().sorted() == d.sorted()
    assert all(is_decomposable(c) is None for c in rep.components)


def test_count_via_components():
    assert count_via_components(h0_sequence(6)) == 1
    assert count_via_components(g_sequence(3)) == 8
    assert count_via_components(g_sequence(2)) == len(enumerate_realizations(g_sequence(2)))
    d = compose_sequences(hk_sequence(3, 1), g_sequence(2))
    assert count_via_components(d, LIMIT) == len(enumerate_realizations(d, LIMIT)) == 20


def test_alternating_cycle_examples():
    H = halfgraph(4)
    assert all(find_alternating_cycle(H, x, y) is None for x in range(1, 5) for y in range(1, 5))
    M = Realization.from_edges(2, 2, [(1, 1), (2, 2)])
    C = find_alternating_cycle(M, 1, 2)
    assert len(C) == 4 and C.ell == 1
    assert C.edges == (False, True, False, True)


def _check_cycle(G, C):
    m = len(C)
    assert m % 2 == 0
    assert all(C.edges[t] != C.edges[(t + 1) % m] for t in range(m))
    assert all(G.has_edge(i, j) == e for (i, j), e in zip(C.pairs(), C.edges))


def _assert_halfgraph(G, Ap, Bp):
    H = induced(G, Ap, Bp)
    assert H == halfgraph(len(Ap))


def _shortest_cycle_instance(ell):
    """a_s ~ b_t iff s == t or s >= t + 2, for s, t = 1..ell+1: the pair a_1 b_{ell+1}
    closes an alternating cycle of length 2 ell + 2 and no shorter one."""
    m = ell + 1
    return Realization.from_edges(m, m, [(s, t) for s in range(1, m + 1) for t in range(1, m + 1) if s == t or s >= t + 2])


@pytest.mark.parametrize("ell", [3, 6])
def test_long_cycle_instances(ell):
    G = _shortest_cycle_instance(ell)
    C = find_alternating_cycle(G, 1, ell + 1)
    _check_cycle(G, C)
    assert len(C) == 2 * ell + 2 and C.ell == ell
    Ap, Bp = extract_induced_halfgraph(G, C)
    assert len(Ap) == ceil(ell / 3)
    _assert_halfgraph(G, Ap, Bp)


def test_extract_rejects_non_shortest():
    G = _shortest_cycle_instance(3)
    C = find_alternating_cycle(G, 1, 4)
    H = G.toggled([(4, 1)])
    with pytest.raises(CycleNotShortest):
        extract_induced_halfgraph(H, C)


@pytest.mark.parametrize("d", [hk_sequence(6, 1), hk_sequence(7, 1), DegreeSequence([3, 3, 2, 2, 1], [1, 2, 2, 3, 3])])
def test_cycles_cover_and_extract(d):
    ells = set()
    for G in enumerate_realizations(d, LIMIT)[:60]:
        assert is_covered_by_alternating_cycles(G)
        for x in range(1, G.nA + 1):
            for y in range(1, G.nB + 1):
                C = find_alternating_cycle(G, x, y)
                _check_cycle(G, C)
                Ap, Bp = extract_induced_halfgraph(G, C)
                assert len(Ap) == ceil(C.ell / 3)
                _assert_halfgraph(G, Ap, Bp)
                ells.add(C.ell)
    assert ells


def test_s2():
    assert not all_s2_graphic(h0_sequence(3))
    assert all(all_s2_graphic(hk_sequence(n, k)) for n in range(2, 7) for k in range(1, n))
    nb = s2_neighbors(DegreeSequence([1], [1]))
    assert ((2,), (2,)) in nb and ((0,), (0,)) in nb
    assert all(sum(a) == sum(b) for a, b in nb)


def _simple_graphs_with(degrees):
    n = len(degrees)
    pairs = list(itertools.combinations(range(n), 2))
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        deg = [0] * n
        for (u, v), x in zip(pairs, bits):
            deg[u] += x
            deg[v] += x
        if tuple(deg) == tuple(degrees):
            yield frozenset(p for p, x in zip(pairs, bits) if x)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_psi_of_halfgraph_is_unique_realization(n):
    S = psi_inverse(halfgraph(n))
    found = list(_simple_graphs_with(S.degrees()))
    assert found == [S.edges]


def test_psi_examples():
    S = psi_inverse(Realization.empty(2, 0))
    assert S.n == 2 and S.edges == {(0, 1)}
    reals = enumerate_realizations(hk_sequence(4, 1))
    for X, Y in itertools.combinations(reals[:20], 2):
        assert len(psi_inverse(X).symmetric_difference(psi_inverse(Y))) == len(X.symmetric_difference(Y))


def test_psi_preserves_switch_adjacency():
    reals = enumerate_realizations(hk_sequence(4, 1))
    for X in reals:
        nbrs = {Y.rows for Y in reals if len(X.symmetric_difference(Y)) == 4}
        assert len(nbrs) == len(valid_switches(X))
        for Y in reals:
            if Y != X:
                assert psi_inverse(X).is_switch_of(psi_inverse(Y)) == (Y.rows in nbrs)
