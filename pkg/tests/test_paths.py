import itertools

import pytest

from bipswitch.bigraph import enumerate_realizations
from bipswitch.chain import exact_mixing, sample_many
from bipswitch.errors import InconsistentEncoding, TooSmall
from bipswitch.flow import agrees_outside, h0_sequence, halfgraph, hk_sequence
from bipswitch.paths import (
    CanonicalPath,
    Encoding,
    canonical_path,
    encoding,
    left_compress,
    measure_load,
    milestones,
    reconstruct,
    validate_path,
    window_width,
)


def _all(n):
    return {(s, i) for s in "ab" for i in range(1, n + 1)}


def test_left_compress():
    G = enumerate_realizations(hk_sequence(4, 1))[3]
    assert left_compress(G, _all(4)) == G
    assert left_compress(halfgraph(3), {("a", 3), ("b", 3)}).edges() == [(1, 1)]
    # order preserved: keep indices 2 and 4 of H0(4)
    C = left_compress(halfgraph(4), {("a", 2), ("b", 2), ("a", 4), ("b", 4)})
    assert C == halfgraph(2)


def test_window_width():
    assert window_width(7, 1) == 5
    assert window_width(6, 1) == 6


def test_milestones_small_n():
    X, Y = enumerate_realizations(hk_sequence(6, 1))[:2]
    with pytest.raises(TooSmall):
        milestones(X, Y)


def test_milestones_k0():
    H = halfgraph(5)
    sched = milestones(H, H)
    assert all(G == H for G in sched.realizations)


@pytest.mark.parametrize("n,k", [(8, 1), (9, 1), (10, 2)])
def test_milestone_schedule(n, k):
    d = hk_sequence(n, k)
    S = sample_many(d, 10, 5000, seed=n + k)
    for X, Y in zip(S[::2], S[1::2]):
        sched = milestones(X, Y)
        assert len(sched) == 2 * (n - 3 * k - 3) + 3
        ms = sched.milestones
        assert ms[0].state == X and ms[-1].state == Y
        for m in ms[1:-1]:
            a, b = map(int, m.label[2:-1].split(","))
            assert m.state.degree_sequence() == d
            assert agrees_outside(m.state, Y, X, a - 1, b)
        for u, v in zip(sched.realizations, sched.realizations[1:]):
            assert len(u.symmetric_difference(v)) <= (5 * k + 2) ** 2


@pytest.mark.parametrize("n,k", [(8, 1), (10, 1), (10, 2)])
def test_paths_on_random_pairs(n, k):
    d = hk_sequence(n, k)
    S = sample_many(d, 20, 5000, seed=7 * n + k)
    for X, Y in zip(S[::2], S[1::2]):
        p = canonical_path(X, Y)
        validate_path(p, X, Y)
        assert max(p.segment_lengths) <= 0.5 * (5 * k + 2) ** 2
        for Z, L in zip(p.states, p.encodings):
            assert L.gx.nA <= 5 * k + 2 and L.gy.nA <= 5 * k + 2
            assert L.reverse_buffer.degree_sequence() == d
            assert reconstruct(Z, L, d) == (X, Y)


def test_path_trivial():
    X = enumerate_realizations(hk_sequence(5, 1))[4]
    p = canonical_path(X, X)
    assert p.moves == () and len(p) == 0


def test_all_pairs_h1_5():
    reals = enumerate_realizations(hk_sequence(5, 1))
    d = hk_sequence(5, 1)
    for X, Y in itertools.permutations(reals, 2):
        p = canonical_path(X, Y)
        validate_path(p, X, Y)
        assert p.encodings[0].reverse_buffer == Y
        assert reconstruct(X, p.encodings[0], d) == (X, Y)


def test_reconstruct_rejects_corruption():
    d = hk_sequence(8, 1)
    X, Y = sample_many(d, 2, 5000, seed=1)
    p = canonical_path(X, Y)
    Z, L = p.states[1], p.encodings[1]
    bad_gx = L.gx.toggled([(1, 1)])
    with pytest.raises(InconsistentEncoding):
        reconstruct(Z, Encoding(L.reverse_buffer, bad_gx, L.gy, L.index), d)


def test_encoding_at_x():
    d = hk_sequence(8, 1)
    X, Y = sample_many(d, 2, 5000, seed=4)
    L = encoding(X, Y, 0)
    assert L.reverse_buffer == Y
    assert reconstruct(X, L, d) == (X, Y)


def test_json_roundtrip_shape():
    X, Y = enumerate_realizations(hk_sequence(5, 1))[:2]
    p = canonical_path(X, Y)
    data = p.to_dict()
    assert len(data["moves"]) == len(p.moves)
    assert isinstance(p, CanonicalPath)


def test_load_halfgraph():
    rep = measure_load(h0_sequence(5))
    assert rep.state_count == 1 and rep.rho == 0 and rep.edge_counts == ()


def test_load_h1_5_and_sinclair():
    rep = measure_load(hk_sequence(5, 1), check=True)
    assert rep.state_count == 34 and rep.reconstruct_checked > 0
    assert rep.distinct_encodings <= rep.encoding_constant * rep.state_count * rep.n + 1e-9
    tau = exact_mixing(hk_sequence(5, 1), [0.25]).tau[0.25]
    assert 0 < tau <= rep.sinclair(0.25)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "edge,from,to,paths,load" and len(lines) == len(rep.edge_counts) + 1
