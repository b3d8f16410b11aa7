"""Composition of splitted bipartite graphs and the indecomposable decomposition.

``G ∘ H`` is the disjoint union plus every edge from ``A(G)`` to ``B(H)``.  On
output ``A(G)`` precedes ``A(H)`` and ``B(G)`` precedes ``B(H)``.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import accumulate
from math import ceil, prod

from .bigraph import DEFAULT_ORACLE_LIMIT, DegreeSequence, Realization, enumerate_realizations, is_bigraphic
from .errors import CycleNotShortest, NotGraphic

Vertex = tuple[str, int]


def compose(G: Realization, H: Realization) -> Realization:
    full_bh = ((1 << H.nB) - 1) << G.nB
    rows = tuple(r | full_bh for r in G.rows) + tuple(r << G.nB for r in H.rows)
    return Realization(G.nA + H.nA, G.nB + H.nB, rows)


def compose_sequences(d1: DegreeSequence, d2: DegreeSequence) -> DegreeSequence:
    return DegreeSequence(
        [x + d2.nB for x in d1.degA] + list(d2.degA),
        list(d1.degB) + [x + d1.nA for x in d2.degB],
    )


def compose_all(parts) -> DegreeSequence:
    out = DegreeSequence((), ())
    for p in parts:
        out = compose_sequences(out, p)
    return out


def is_decomposable(d: DegreeSequence) -> tuple[int, int] | None:
    """First ``(p, q)`` in lexicographic order splitting the sorted sequence.

    ``p`` counts the largest A-degrees and ``q`` the smallest B-degrees that
    form the left factor.  ``None`` means indecomposable.
    """
    dA = sorted(d.degA, reverse=True)
    dB = sorted(d.degB, reverse=True)
    nA, nB = len(dA), len(dB)
    pre_a = [0, *accumulate(dA)]
    suf_b = [0, *accumulate(reversed(dB))]  # suf_b[q] = sum of q smallest
    for p in range(nA + 1):
        for q in range(nB + 1):
            if 0 < p + q < nA + nB and pre_a[p] == p * (nB - q) + suf_b[q]:
                return p, q
    return None


def _split(d: DegreeSequence, p: int, q: int) -> tuple[DegreeSequence, DegreeSequence]:
    dA = sorted(d.degA, reverse=True)
    dB = sorted(d.degB, reverse=True)
    nB = len(dB)
    left = DegreeSequence([x - (nB - q) for x in dA[:p]], dB[nB - q:])
    right = DegreeSequence(dA[p:], [x - p for x in dB[: nB - q]])
    return left, right


@dataclass(frozen=True)
class DecompositionReport:
    components: tuple[DegreeSequence, ...]
    split_points: tuple[tuple[int, int], ...]

    def recompose(self) -> DegreeSequence:
        return compose_all(self.components)

    def to_dict(self) -> dict:
        return {
            "components": [c.to_dict() for c in self.components],
            "splitPoints": [list(s) for s in self.split_points],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _decompose(d: DegreeSequence) -> list[DegreeSequence]:
    w = is_decomposable(d)
    if w is None:
        return [d.sorted()]
    left, right = _split(d, *w)
    return _decompose(left) + _decompose(right)


def decompose(d: DegreeSequence) -> DecompositionReport:
    """Maximal decomposition into indecomposable factors, left to right.

    Factors are taken in sorted coordinates, so recomposing them gives ``d``
    up to the order of vertices inside each class.

    ``split_points`` lists the cumulative ``(p, q)`` after each factor but the
    last; each is itself a witness in the sorted coordinates of ``d``.
    """
    if not is_bigraphic(d):
        raise NotGraphic(f"{d} is not bigraphic")
    if d.nA + d.nB == 0:
        return DecompositionReport((), ())
    comps = _decompose(d)
    splits = []
    p = q = 0
    for c in comps[:-1]:
        p, q = p + c.nA, q + c.nB
        splits.append((p, q))
    return DecompositionReport(tuple(comps), tuple(splits))


def component_partition(G: Realization, report: DecompositionReport | None = None) -> list[tuple[list[int], list[int]]]:
    """Vertex classes of each factor in ``G`` (1-indexed A and B lists).

    Factor ``i`` takes the next-largest A-degrees and the next-smallest
    B-degrees; ties may be broken arbitrarily.
    """
    d = G.degree_sequence()
    report = report or decompose(d)
    a_order = sorted(range(1, G.nA + 1), key=lambda i: (-d.degA[i - 1], i))
    b_order = sorted(range(1, G.nB + 1), key=lambda j: (d.degB[j - 1], j))
    out, pa, pb = [], 0, 0
    for c in report.components:
        out.append((sorted(a_order[pa : pa + c.nA]), sorted(b_order[pb : pb + c.nB])))
        pa, pb = pa + c.nA, pb + c.nB
    return out


def induced(G: Realization, As: list[int], Bs: list[int]) -> Realization:
    return Realization.from_edges(
        len(As), len(Bs),
        [(x, y) for x, i in enumerate(As, 1) for y, j in enumerate(Bs, 1) if G.has_edge(i, j)],
    )


def count_via_components(d: DegreeSequence, limit: int = DEFAULT_ORACLE_LIMIT) -> int:
    return prod(len(enumerate_realizations(c, limit)) for c in decompose(d).components)


# ------------------------------------------------------- alternating cycles


@dataclass(frozen=True)
class AlternatingCycle:
    """Cyclic vertex list starting with the anchor pair ``x, y``.

    ``edges[t]`` tells whether the pair ``vertices[t], vertices[t+1]``
    (cyclically) is an edge of the host graph.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[bool, ...]

    def __len__(self):
        return len(self.vertices)

    @property
    def ell(self) -> int:
        return len(self.vertices) // 2 - 1

    def pairs(self) -> list[tuple[int, int]]:
        out = []
        m = len(self.vertices)
        for t in range(m):
            u, v = self.vertices[t], self.vertices[(t + 1) % m]
            out.append((u[1], v[1]) if u[0] == "a" else (v[1], u[1]))
        return out


def find_alternating_cycle(G: Realization, x: int, y: int) -> AlternatingCycle | None:
    """Shortest alternating cycle through the pair ``a_x b_y``, by BFS from ``b_y``."""
    anchor = G.has_edge(x, y)
    # Leaving a B-vertex uses the parity opposite to the anchor; leaving an A-vertex uses the anchor's.
    prev: dict[Vertex, Vertex | None] = {("b", y): None}
    q = deque([("b", y)])
    found = False
    while q and not found:
        u = q.popleft()
        if u[0] == "b":
            for i in range(1, G.nA + 1):
                v = ("a", i)
                if v in prev or G.has_edge(i, u[1]) == anchor:
                    continue
                if i == x and u == ("b", y):
                    continue
                prev[v] = u
                if i == x:
                    found = True
                    break
                q.append(v)
        else:
            for j in range(1, G.nB + 1):
                v = ("b", j)
                if v in prev or G.has_edge(u[1], j) != anchor:
                    continue
                prev[v] = u
                q.append(v)
    if not found:
        return None
    path = []
    v = ("a", x)
    while v is not None:
        path.append(v)
        v = prev[v]
    # path runs x, ..., y; the cycle starts x, y and walks the path backwards
    verts = (("a", x),) + tuple(reversed(path[1:]))
    m = len(verts)
    edges = []
    for t in range(m):
        u, v = verts[t], verts[(t + 1) % m]
        i, j = (u[1], v[1]) if u[0] == "a" else (v[1], u[1])
        edges.append(G.has_edge(i, j))
    return AlternatingCycle(verts, tuple(edges))


def is_covered_by_alternating_cycles(G: Realization) -> bool:
    return all(
        find_alternating_cycle(G, i, j) is not None
        for i in range(1, G.nA + 1)
        for j in range(1, G.nB + 1)
    )


def cycle_labels(C: AlternatingCycle) -> tuple[list[int], list[int]]:
    """Indices of ``a_1..a_{l+1}`` and ``b_1..b_{l+1}`` along the path from x to y
    that remains after dropping the anchor pair."""
    x, y, *rest = C.vertices
    walk = [x] + list(reversed(rest)) + [y]
    return [v[1] for v in walk[0::2]], [v[1] for v in walk[1::2]]


def extract_induced_halfgraph(G: Realization, C: AlternatingCycle) -> tuple[list[int], list[int]]:
    """A', B' (1-indexed, listed so that ``a'_s ~ b'_t`` iff ``s <= t``) inducing a
    half-graph of order ``ceil(l/3)`` where the cycle has length ``2l+2``.

    Minimality of ``C`` forces the chord pattern along the path: with an
    anchor non-edge, ``a_s b_t`` is an edge iff ``s == t`` or ``s >= t+2``;
    with an anchor edge the complement holds.  A violated pattern means ``C``
    was not shortest.
    """
    As, Bs = cycle_labels(C)
    ell = C.ell
    anchor = C.edges[0]
    for s, i in enumerate(As, 1):
        for t, j in enumerate(Bs, 1):
            expect = (s == t or s >= t + 2) != anchor
            if G.has_edge(i, j) != expect:
                raise CycleNotShortest(f"pair a{i} b{j} breaks the chord pattern of a shortest cycle")
    m = ceil(ell / 3)
    if anchor:
        Ap = [As[3 * r - 3] for r in range(1, m + 1)]
        Bp = [Bs[3 * r - 2] for r in range(1, m + 1)]
    else:
        # edges iff s >= t on these indices; reverse both lists to read as s <= t
        Ap = [As[3 * r - 3] for r in range(m, 0, -1)]
        Bp = [Bs[3 * r - 3] for r in range(m, 0, -1)]
    return Ap, Bp


# ---------------------------------------------------- split-graph embedding


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def symmetric_difference(self, other: "SimpleGraph") -> frozenset[tuple[int, int]]:
        return self.edges ^ other.edges

    def is_switch_of(self, other: "SimpleGraph") -> bool:
        """Do the two graphs differ by exactly one switch (an alternating 4-cycle)?"""
        if self.n != other.n or self.degrees() != other.degrees():
            return False
        diff = self.symmetric_difference(other)
        if len(diff) != 4:
            return False
        verts = {v for e in diff for v in e}
        return len(verts) == 4


def psi_inverse(G: Realization) -> SimpleGraph:
    """``G`` with a clique added on A; A takes labels ``0..nA-1``, B follows."""
    nA = G.nA
    edges = {(u, v) for u in range(nA) for v in range(u + 1, nA)}
    edges |= {(i - 1, nA + j - 1) for i, j in G.edges()}
    return SimpleGraph(nA + G.nB, frozenset(edges))


def s2_neighbors(d: DegreeSequence) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Integer vectors at l1-distance 2 from ``d`` with equal side sums.

    Entries may be negative or exceed the opposite side; such vectors are
    simply not graphic.
    """
    out = set()
    nA = d.nA
    vec = list(d.degA) + list(d.degB)
    side = [0] * nA + [1] * d.nB
    N = len(vec)
    for u in range(N):
        for v in range(N):
            if u == v:
                continue
            for su, sv in ((1, 1), (-1, -1), (1, -1)):
                if (su == sv) == (side[u] == side[v]):
                    continue  # equal signs must straddle the sides, opposite signs must not
                w = vec[:]
                w[u] += su
                w[v] += sv
                out.add((tuple(w[:nA]), tuple(w[nA:])))
    return sorted(out)


def all_s2_graphic(d: DegreeSequence) -> bool:
    return all(
        min(a + b, default=0) >= 0 and is_bigraphic(DegreeSequence(a, b))
        for a, b in s2_neighbors(d)
    )
