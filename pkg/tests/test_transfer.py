import math

import numpy as np
import pytest

from bipswitch.bigraph import enumerate_realizations
from bipswitch.errors import NotSingleSource
from bipswitch.flow import enumerate_flows, excess_profile, flow_representation, hk_sequence
from bipswitch.transfer import (
    FlowType,
    count_hk,
    count_hk_matrix,
    end_vector,
    is_primitive,
    partitions,
    perron_root,
    principal_minor_with_one,
    stability_probe,
    start_vector,
    type_matrix,
    type_of,
    types,
)

from conftest import LIMIT


def test_types():
    assert types(1) == (FlowType((), (1,)), FlowType((1,), ()))
    assert len(types(2)) == 5
    for k in range(1, 6):
        p = [len(partitions(m)) for m in range(k + 1)]
        assert len(types(k)) == sum(p[m] * p[k - m] for m in range(k + 1))
        assert all(t.k == k for t in types(k))


def test_p1():
    assert type_matrix(1).entries == ((2, 1), (1, 1))
    for k in (1, 2, 3):
        A = type_matrix(k).array(int)
        assert (A.sum(axis=1) >= 1).all()


def test_matrix_well_defined():
    for k in (1, 2):
        assert type_matrix(k, witnesses=3).entries == type_matrix(k).entries


def test_vectors():
    assert sum(start_vector(2)) == 2 and sum(end_vector(2)) == 1


def test_count_examples():
    assert [count_hk_matrix(1, n) for n in range(1, 5)] == [1, 2, 5, 13]
    assert count_hk(0, 5) == 1


def test_count_matches_recursion():
    s1, s2 = 1, 0
    for n in range(1, 12):
        assert count_hk_matrix(1, n) == s1
        s1, s2 = 2 * s1 + s2, s1 + s2


@pytest.mark.parametrize("n", range(3, 8))
def test_count_k2_oracle(n):
    assert count_hk_matrix(2, n) == len(enumerate_realizations(hk_sequence(n, 2), LIMIT))


def test_count_k3_flows():
    for n in (4, 5, 6):
        assert count_hk_matrix(3, n) == len(enumerate_flows(n, excess_profile(hk_sequence(n, 3))))


def test_type_of():
    d = hk_sequence(5, 1)
    for G in enumerate_realizations(d):
        W = flow_representation(G)
        assert type_of(W, 5) == FlowType((), (1,)) or type_of(W, 5) == FlowType((1,), ())
    d = hk_sequence(5, 2)
    for G in enumerate_realizations(d, LIMIT)[:30]:
        assert type_of(flow_representation(G), 1) in (FlowType((1,), (1,)), FlowType((), (2,)), FlowType((2,), ()))


def test_type_of_rejects_other_sources():
    from bipswitch.bigraph import DegreeSequence, havel_hakimi

    d = DegreeSequence([7, 7, 6, 5, 4, 3, 3, 1], [1, 4, 3, 4, 5, 6, 7, 6])  # sources at a1 and b2
    W = flow_representation(havel_hakimi(d))
    assert excess_profile(d).k == 3
    with pytest.raises(NotSingleSource):
        type_of(W, 2)


def test_perron():
    assert abs(perron_root(type_matrix(1)) - (3 + math.sqrt(5)) / 2) < 1e-9
    assert perron_root([[7.0]]) == pytest.approx(7.0)
    r = [perron_root(type_matrix(k)) for k in (1, 2, 3)]
    assert r[0] < r[1] < r[2]
    ev = max(abs(np.linalg.eigvals(type_matrix(2).array(float))))
    assert abs(r[1] - ev) < 1e-9


def test_primitive():
    for k in (1, 2, 3):
        assert is_primitive(type_matrix(k))
        A = np.linalg.matrix_power(type_matrix(k).array(int), 2 * k)
        assert (A > 0).all()
    assert not is_primitive([[0, 1], [1, 0]])


def test_minor_contains_pk():
    for k in (1, 2):
        M = np.array(principal_minor_with_one(k))
        P = type_matrix(k).array(int)
        assert M.shape == P.shape
        assert (M >= P).all() and (M != P).any()


def test_stability_probe():
    rep = stability_probe(2, range(15, 26))
    for row in rep.rows:
        assert row.l1_distance == 2
        if row.growth is not None and row.n >= 20:
            assert abs(row.growth / row.target - 1) < 0.05
    assert rep.growth_exceeds_one(1)
    csv = rep.to_csv().splitlines()
    assert csv[0].split(",")[-2] == "r_ratio"
