"""Counting k-flows from ``a_1`` to ``b_n`` by transfer matrices over flow types.

A k-flow emanating from ``a_1`` and cut down to ``U_l`` leaves some units
*pending* at vertices of ``U_l`` (in-flow minus out-flow inside ``U_l``, with
``k`` credited to ``a_1``).  The type of the prefix records the multiset of
pending amounts on A-vertices (``R``) and on B-vertices (``Q``).  One-column
extensions move between types with counts that only depend on the types.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import DomainError, NotPrimitive, NotSingleSource
from .flow import FlowRep, arc, feasible_flow, hk_sequence

Partition = tuple[int, ...]


@dataclass(frozen=True, order=True)
class FlowType:
    """Pending amounts on A-vertices (``R``) and B-vertices (``Q``), ascending."""

    R: Partition
    Q: Partition

    @property
    def k(self) -> int:
        return sum(self.R) + sum(self.Q)

    def sort_key(self):
        return (sum(self.R), self.R, self.Q)

    def __str__(self):
        fmt = lambda p: "{" + ",".join(map(str, p)) + "}" if p else "{}"
        return f"({fmt(self.R)},{fmt(self.Q)})"


def partitions(m: int, largest: int | None = None) -> list[Partition]:
    """Partitions of ``m`` as ascending tuples."""
    if m == 0:
        return [()]
    largest = m if largest is None else largest
    out = []
    for first in range(min(m, largest), 0, -1):
        out.extend(p + (first,) for p in partitions(m - first, first))
    return sorted(out)


@lru_cache(maxsize=None)
def types(k: int) -> tuple[FlowType, ...]:
    if k < 1:
        raise DomainError("types need k >= 1")
    out = [FlowType(R, Q) for m in range(k + 1) for R in partitions(m) for Q in partitions(k - m)]
    return tuple(sorted(out, key=FlowType.sort_key))


def pending(W: FlowRep | frozenset, ell: int, k: int) -> dict[tuple[str, int], int]:
    """Pending amount at each vertex of ``U_ell`` for a k-flow from ``a_1``."""
    arcs = W.arcs if isinstance(W, FlowRep) else W
    pend: dict[tuple[str, int], int] = {("a", 1): k}
    for i, j in arcs:
        if i > ell or j > ell:
            continue
        u, v = arc(i, j)
        pend[u] = pend.get(u, 0) - 1
        pend[v] = pend.get(v, 0) + 1
    return pend


def type_of(W: FlowRep | frozenset, ell: int, k: int | None = None) -> FlowType:
    """Type of the flow ``W`` cut down to ``U_ell``.

    ``k`` defaults to the positive excess at ``a_1``.
    """
    if k is None:
        if not isinstance(W, FlowRep):
            raise DomainError("k is required for a bare arc set")
        k = W.excess[("a", 1)]
        others = {v: x for v, x in W.excess.sources.items() if v != ("a", 1)}
        if k <= 0 or others:
            raise NotSingleSource("flow does not emanate from a_1 alone")
    pend = pending(W, ell, k)
    neg = [v for v, x in pend.items() if x < 0]
    if neg:
        s, i = neg[0]
        raise NotSingleSource(f"{s}{i} emits more than it receives inside U_{ell}")
    R = tuple(sorted(x for (s, _), x in pend.items() if s == "a" and x > 0))
    Q = tuple(sorted(x for (s, _), x in pend.items() if s == "b" and x > 0))
    return FlowType(R, Q)


def witness_flow(t: FlowType, ell: int, shift: int = 0) -> frozenset:
    """Some k-flow prefix on ``U_ell`` of type ``t``.

    Pending A-amounts sit at the last ``|R|`` A-vertices (``a_1`` counted among
    them only if needed) and B-amounts at the last ``|Q|`` B-vertices, offset
    to the left by ``shift``.
    """
    k = t.k
    excess: dict[tuple[str, int], int] = {("a", 1): k}
    a_slots = list(range(ell - shift, 0, -1))[: len(t.R)]
    b_slots = list(range(ell - shift, 0, -1))[: len(t.Q)]
    if len(a_slots) < len(t.R) or len(b_slots) < len(t.Q):
        raise DomainError("prefix too short for this type")
    for i, x in zip(a_slots, reversed(t.R)):
        excess[("a", i)] = excess.get(("a", i), 0) - x
    for j, x in zip(b_slots, reversed(t.Q)):
        excess[("b", j)] = excess.get(("b", j), 0) - x
    res = feasible_flow(ell, lambda i, j: True, excess)
    if not res:
        raise DomainError(f"no witness flow for {t} on U_{ell}")
    got = type_of(res.flow.arcs, ell, k)
    assert got == t, (got, t)
    return res.flow.arcs


def extension_counts(prefix: frozenset, ell: int, k: int) -> dict[FlowType, int]:
    """Exhaustive one-column extensions of a prefix on ``U_ell`` to ``U_{ell+1}``.

    Arcs into ``a_{ell+1}`` come from ``b_1..b_ell`` and arcs into
    ``b_{ell+1}`` from ``a_1..a_{ell+1}``.  A tail without pending flow would
    turn negative, so only pending tails and ``a_{ell+1}`` are tried.
    """
    pend = pending(prefix, ell, k)
    nxt = ell + 1
    cand = [(i, nxt) for (s, i), x in sorted(pend.items()) if s == "a" and x > 0]
    cand += [(nxt, j) for (s, j), x in sorted(pend.items()) if s == "b" and x > 0]
    cand.append((nxt, nxt))
    out: dict[FlowType, int] = {}
    for r in range(len(cand) + 1):
        for extra in combinations(cand, r):
            try:
                t = type_of(prefix | frozenset(extra), nxt, k)
            except NotSingleSource:
                continue
            out[t] = out.get(t, 0) + 1
    return out


@dataclass(frozen=True)
class TypeMatrix:
    k: int
    order: tuple[FlowType, ...]
    entries: tuple[tuple[int, ...], ...]

    def array(self, dtype=object) -> np.ndarray:
        return np.array(self.entries, dtype=dtype)

    def __len__(self):
        return len(self.order)

    def index(self, t: FlowType) -> int:
        return self.order.index(t)

    def to_dict(self) -> dict:
        return {"k": self.k, "order": [str(t) for t in self.order], "entries": [list(r) for r in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _matrix_rows(k: int, ell: int, shift: int) -> tuple[tuple[int, ...], ...]:
    order = types(k)
    rows = []
    for ti in order:
        counts = extension_counts(witness_flow(ti, ell, shift), ell, k)
        rows.append(tuple(counts.get(tj, 0) for tj in order))
    return tuple(rows)


@lru_cache(maxsize=None)
def type_matrix(k: int, witnesses: int = 1) -> TypeMatrix:
    """``p_ij`` = number of one-column extensions of a type-``i`` prefix landing in type ``j``.

    With ``witnesses > 1`` the rows are recomputed from prefixes with pending
    vertices placed elsewhere and on longer prefixes; any disagreement raises.
    """
    ell = 2 * k
    rows = _matrix_rows(k, ell, 0)
    for w in range(1, witnesses):
        other = _matrix_rows(k, ell + w, w)
        if other != rows:
            raise AssertionError(f"type matrix for k={k} depends on the witness flow")
    return TypeMatrix(k, types(k), rows)


def _vec_mat(v: list[int], M: tuple[tuple[int, ...], ...]) -> list[int]:
    m = len(v)
    return [sum(v[i] * M[i][j] for i in range(m) if v[i]) for j in range(m)]


def start_vector(k: int) -> list[int]:
    """Types of a flow from ``a_1`` cut to ``U_1``: ``a_1 b_1`` used or not."""
    order = types(k)
    starts = {FlowType((k,), ()), FlowType(tuple(x for x in (k - 1,) if x), (1,))}
    return [int(t in starts) for t in order]


def end_vector(k: int) -> list[int]:
    """Marks the type with ``k`` distinct A-vertices each pending one unit."""
    return [int(t == FlowType((1,) * k, ())) for t in types(k)]


def count_hk_matrix(k: int, n: int) -> int:
    """Number of k-flows from ``a_1`` to ``b_n`` in ``F_n``, i.e. realizations of ``h_k(n)``."""
    if k < 1 or n < 1:
        raise DomainError("need k >= 1 and n >= 1")
    P = type_matrix(k).entries
    v = start_vector(k)
    for _ in range(n - 1):
        v = _vec_mat(v, P)
    w = end_vector(k)
    return sum(a * b for a, b in zip(v, w))


def count_hk(k: int, n: int) -> int:
    """Like :func:`count_hk_matrix` but with ``h_0(n)`` (one realization) at ``k = 0``."""
    return 1 if k == 0 else count_hk_matrix(k, n)


def is_primitive(P, power: int | None = None) -> bool:
    A = (np.asarray(P.entries if isinstance(P, TypeMatrix) else P, dtype=float) > 0).astype(np.int64)
    m = A.shape[0]
    if power is None:
        power = 2 * P.k if isinstance(P, TypeMatrix) else (m - 1) ** 2 + 1
    M = np.eye(m, dtype=np.int64)
    for _ in range(power):
        M = np.minimum(M @ A, 1)
    return bool((M > 0).all())


def perron_root(P, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Dominant eigenvalue of a primitive nonnegative matrix by power iteration."""
    A = np.asarray(P.entries if isinstance(P, TypeMatrix) else P, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or (A < 0).any():
        raise DomainError("need a square nonnegative matrix")
    if not is_primitive(P):
        raise NotPrimitive("matrix has no entrywise positive power")
    x = np.ones(A.shape[0]) / np.sqrt(A.shape[0])
    lam = float(x @ A @ x)
    for _ in range(max_iter):
        y = A @ x
        x = y / np.linalg.norm(y)
        new = float(x @ A @ x)
        if abs(new - lam) <= tol * abs(lam):
            return new
        lam = new
    return lam


def perron_root_k(k: int) -> float:
    return 1.0 if k == 0 else perron_root(type_matrix(k))


def principal_minor_with_one(k: int) -> tuple[tuple[int, ...], ...]:
    """Rows/columns of ``P_{k+1}`` on types whose ``R`` contains a 1, ordered
    like the ``P_k`` types they extend (one extra A-vertex pending one unit)."""
    big = type_matrix(k + 1)
    idx = [big.index(FlowType(tuple(sorted(t.R + (1,))), t.Q)) for t in types(k)]
    return tuple(tuple(big.entries[i][j] for j in idx) for i in idx)


@dataclass(frozen=True)
class StabilityRow:
    n: int
    k: int
    count: int
    count_next: int
    ratio: float
    growth: float | None
    target: float
    l1_distance: int


@dataclass(frozen=True)
class StabilityReport:
    rows: tuple[StabilityRow, ...]

    def growth_exceeds_one(self, k: int) -> bool:
        g = [r.growth for r in self.rows if r.k == k and r.growth is not None]
        return bool(g) and all(x > 1 for x in g)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "k", "count", "count_next", "ratio", "growth", "r_ratio", "l1_distance"])
        for r in self.rows:
            w.writerow([r.n, r.k, r.count, r.count_next, f"{r.ratio:.12g}",
                        "" if r.growth is None else f"{r.growth:.12g}", f"{r.target:.12g}", r.l1_distance])
        return buf.getvalue()


def stability_probe(k_max: int, n_range: range) -> StabilityReport:
    """Ratios ``|G(h_{k+1}(n))| / |G(h_k(n))|`` for ``k < k_max`` and their per-n growth.

    The growth factor of the ratio is compared with ``r_{k+1} / r_k``; a factor
    that stays above 1 means the ratio is exponential in ``n``.
    """
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    rows = []
    for k in range(k_max):
        target = perron_root_k(k + 1) / perron_root_k(k)
        prev = None
        for n in n_range:
            if n <= k + 1:
                continue
            c, c1 = count_hk(k, n), count_hk(k + 1, n)
            ratio = Fraction(c1, c)
            growth = float(ratio / prev) if prev is not None else None
            a, b = hk_sequence(n, k), hk_sequence(n, k + 1)
            dist = sum(abs(x - y) for x, y in zip(a.degA + a.degB, b.degA + b.degB))
            rows.append(StabilityRow(n, k, c, c1, float(ratio), growth, target, dist))
            prev = ratio
    return StabilityReport(tuple(rows))
