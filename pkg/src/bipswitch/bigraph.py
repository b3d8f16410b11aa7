"""Labeled bipartite graphs, degree sequences and switches.

Vertices are 1-indexed: ``a_1..a_nA`` and ``b_1..b_nB``.  A realization keeps
one bit row per A-vertex; bit ``j - 1`` of ``rows[i - 1]`` is set iff
``a_i b_j`` is an edge.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

from .errors import DegreeMismatch, InvalidMove, NotGraphic, OracleLimitExceeded

DEFAULT_ORACLE_LIMIT = 36

Pair = tuple[int, int]
# allowed(i, j) -> may the pair a_i b_j be toggled
PairPredicate = Callable[[int, int], bool]


@dataclass(frozen=True)
class DegreeSequence:
    degA: tuple[int, ...]
    degB: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degA", tuple(int(x) for x in self.degA))
        object.__setattr__(self, "degB", tuple(int(x) for x in self.degB))
        if any(x < 0 for x in self.degA + self.degB):
            raise ValueError("degrees must be nonnegative")

    @property
    def nA(self) -> int:
        return len(self.degA)

    @property
    def nB(self) -> int:
        return len(self.degB)

    @property
    def balanced(self) -> bool:
        return sum(self.degA) == sum(self.degB)

    def sorted(self) -> "DegreeSequence":
        """Both sides in non-increasing order."""
        return DegreeSequence(sorted(self.degA, reverse=True), sorted(self.degB, reverse=True))

    def to_dict(self) -> dict:
        return {"degA": list(self.degA), "degB": list(self.degB)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, data) -> "DegreeSequence":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["degA"], data["degB"])

    def __str__(self):
        return f"({','.join(map(str, self.degA))};{','.join(map(str, self.degB))})"


@dataclass(frozen=True)
class Realization:
    nA: int
    nB: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nA:
            raise ValueError("need one row per A-vertex")
        full = (1 << self.nB) - 1
        if any(r & ~full for r in self.rows):
            raise ValueError("row has bits outside B")

    @classmethod
    def empty(cls, nA: int, nB: int) -> "Realization":
        return cls(nA, nB, (0,) * nA)

    @classmethod
    def from_edges(cls, nA: int, nB: int, edges: Iterable[Pair]) -> "Realization":
        rows = [0] * nA
        for i, j in edges:
            if not (1 <= i <= nA and 1 <= j <= nB):
                raise ValueError(f"edge a{i} b{j} outside {nA}x{nB}")
            rows[i - 1] |= 1 << (j - 1)
        return cls(nA, nB, tuple(rows))

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i - 1] >> (j - 1) & 1)

    def neighbors(self, i: int) -> list[int]:
        r = self.rows[i - 1]
        return [j + 1 for j in range(self.nB) if r >> j & 1]

    def edges(self) -> list[Pair]:
        """Edges sorted lexicographically."""
        return [(i + 1, j + 1) for i, r in enumerate(self.rows) for j in range(self.nB) if r >> j & 1]

    @property
    def n_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def degA(self) -> tuple[int, ...]:
        return tuple(r.bit_count() for r in self.rows)

    def degB(self) -> tuple[int, ...]:
        return tuple(sum(r >> j & 1 for r in self.rows) for j in range(self.nB))

    def degree_sequence(self) -> DegreeSequence:
        return DegreeSequence(self.degA(), self.degB())

    def toggled(self, pairs: Iterable[Pair]) -> "Realization":
        rows = list(self.rows)
        for i, j in pairs:
            rows[i - 1] ^= 1 << (j - 1)
        return Realization(self.nA, self.nB, tuple(rows))

    def symmetric_difference(self, other: "Realization") -> list[Pair]:
        _same_shape(self, other)
        return [
            (i + 1, j + 1)
            for i, (r, s) in enumerate(zip(self.rows, other.rows))
            for j in range(self.nB)
            if (r ^ s) >> j & 1
        ]

    def to_edgelist(self) -> str:
        return "".join(f"{i} {j}\n" for i, j in self.edges())

    @classmethod
    def from_edgelist(cls, text: str, nA: int | None = None, nB: int | None = None) -> "Realization":
        edges = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                i, j = line.split()
                edges.append((int(i), int(j)))
        if nA is None:
            nA = max((i for i, _ in edges), default=0)
        if nB is None:
            nB = max((j for _, j in edges), default=0)
        return cls.from_edges(nA, nB, edges)


def _same_shape(x: Realization, y: Realization) -> None:
    if (x.nA, x.nB) != (y.nA, y.nB):
        raise DegreeMismatch(f"shapes differ: {x.nA}x{x.nB} vs {y.nA}x{y.nB}")


@dataclass(frozen=True, order=True)
class SwitchMove:
    """Removes ``a1 b1, a2 b2`` and adds ``a1 b2, a2 b1``.

    Stored with ``a1 < a2``; the mirror ``(a1, a2, b2, b1)`` undoes it.
    """

    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self):
        if self.a1 > self.a2:
            a1, a2, b1, b2 = self.a2, self.a1, self.b2, self.b1
            object.__setattr__(self, "a1", a1)
            object.__setattr__(self, "a2", a2)
            object.__setattr__(self, "b1", b1)
            object.__setattr__(self, "b2", b2)

    @property
    def removed(self) -> tuple[Pair, Pair]:
        return (self.a1, self.b1), (self.a2, self.b2)

    @property
    def added(self) -> tuple[Pair, Pair]:
        return (self.a1, self.b2), (self.a2, self.b1)

    def mirror(self) -> "SwitchMove":
        return SwitchMove(self.a1, self.a2, self.b2, self.b1)

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.a1, self.a2, min(self.b1, self.b2), max(self.b1, self.b2))

    def to_list(self) -> list[int]:
        return [self.a1, self.a2, self.b1, self.b2]


# ---------------------------------------------------------------- graphicality


def _gale_ryser(degA: Sequence[int], degB: Sequence[int]) -> bool:
    if sum(degA) != sum(degB):
        return False
    if any(x > len(degB) for x in degA) or any(x > len(degA) for x in degB):
        return False
    a = sorted(degA, reverse=True)
    lhs = 0
    for k, x in enumerate(a, start=1):
        lhs += x
        if lhs > sum(min(y, k) for y in degB):
            return False
    return True


def is_bigraphic(d: DegreeSequence) -> bool:
    """Gale-Ryser test."""
    return _gale_ryser(d.degA, d.degB)


def havel_hakimi(d: DegreeSequence) -> Realization:
    """Greedy realization: each A-vertex, largest first, takes the B-vertices
    with the most remaining demand (ties broken by lowest index)."""
    if not is_bigraphic(d):
        raise NotGraphic(f"{d} is not bigraphic")
    need = list(d.degB)
    rows = [0] * d.nA
    for i in sorted(range(d.nA), key=lambda i: (-d.degA[i], i)):
        chosen = sorted(range(d.nB), key=lambda j: (-need[j], j))[: d.degA[i]]
        for j in chosen:
            need[j] -= 1
            rows[i] |= 1 << j
    return Realization(d.nA, d.nB, tuple(rows))


def enumerate_realizations(d: DegreeSequence, limit: int = DEFAULT_ORACLE_LIMIT) -> list[Realization]:
    """All labeled realizations of ``d`` by pruned backtracking over A-rows.

    Every partial assignment is kept Gale-Ryser feasible, so each leaf of the
    search is a realization and no branch dies empty-handed.
    """
    if d.nA * d.nB > limit:
        raise OracleLimitExceeded(f"{d.nA}x{d.nB} = {d.nA * d.nB} cells exceeds oracle limit {limit}")
    if not is_bigraphic(d):
        return []
    out: list[Realization] = []
    rows = [0] * d.nA
    need = list(d.degB)

    def rec(i: int) -> None:
        if i == d.nA:
            out.append(Realization(d.nA, d.nB, tuple(rows)))
            return
        open_cols = [j for j in range(d.nB) if need[j] > 0]
        rest = d.degA[i + 1 :]
        for cols in combinations(open_cols, d.degA[i]):
            for j in cols:
                need[j] -= 1
            if _gale_ryser(rest, need):
                rows[i] = sum(1 << j for j in cols)
                rec(i + 1)
            for j in cols:
                need[j] += 1
        rows[i] = 0

    rec(0)
    return out


# -------------------------------------------------------------------- switches


def valid_switches(G: Realization) -> list[SwitchMove]:
    moves = []
    for i1 in range(G.nA):
        r1 = G.rows[i1]
        for i2 in range(i1 + 1, G.nA):
            r2 = G.rows[i2]
            only1 = r1 & ~r2
            only2 = r2 & ~r1
            if not only1 or not only2:
                continue
            for j1 in _bits(only1):
                for j2 in _bits(only2):
                    moves.append(SwitchMove(i1 + 1, i2 + 1, j1 + 1, j2 + 1))
    moves.sort(key=SwitchMove.sort_key)
    return moves


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def is_valid_switch(G: Realization, m: SwitchMove) -> bool:
    if not (1 <= m.a1 < m.a2 <= G.nA and 1 <= m.b1 <= G.nB and 1 <= m.b2 <= G.nB and m.b1 != m.b2):
        return False
    return (
        G.has_edge(m.a1, m.b1)
        and G.has_edge(m.a2, m.b2)
        and not G.has_edge(m.a1, m.b2)
        and not G.has_edge(m.a2, m.b1)
    )


def apply_switch(G: Realization, m: SwitchMove) -> Realization:
    if not is_valid_switch(G, m):
        raise InvalidMove(f"{m} is not a valid switch of this realization")
    return G.toggled(m.removed + m.added)


def switch_neighbors(G: Realization) -> list[Realization]:
    return [apply_switch(G, m) for m in valid_switches(G)]


# ---------------------------------------------------------- switch sequences


def alternating_cycles(X: Realization, Y: Realization) -> list[tuple[list[int], list[int]]]:
    """Split ``X △ Y`` into vertex-simple alternating cycles.

    A cycle is returned as ``(as_, bs)`` with ``a_s b_s`` in ``X - Y`` and
    ``b_s a_{s+1}`` (indices cyclic) in ``Y - X``.
    """
    _same_shape(X, Y)
    xo: dict[int, list[int]] = {}
    yo: dict[int, list[int]] = {}
    for i, j in X.symmetric_difference(Y):
        if X.has_edge(i, j):
            xo.setdefault(i, []).append(j)
        else:
            yo.setdefault(j, []).append(i)
    for lst in list(xo.values()) + list(yo.values()):
        lst.sort(reverse=True)  # pop() yields the smallest

    cycles = []
    while xo:
        start = min(xo)
        as_, bs = [start], []
        pos_a, pos_b = {start: 0}, {}
        while True:
            a = as_[-1]
            if len(bs) == len(as_) - 1:
                if not xo.get(a):
                    break
                b = xo[a].pop()
                if not xo[a]:
                    del xo[a]
                bs.append(b)
                if b in pos_b:
                    p = pos_b[b]
                    cycles.append((as_[p + 1 :], bs[p + 1 :]))
                    for v in as_[p + 1 :]:
                        del pos_a[v]
                    for v in bs[p + 1 : -1]:
                        del pos_b[v]
                    del as_[p + 1 :]
                    del bs[p + 1 :]
                else:
                    pos_b[b] = len(bs) - 1
            b = bs[-1]
            a2 = yo[b].pop()
            if not yo[b]:
                del yo[b]
            if a2 in pos_a:
                p = pos_a[a2]
                cycles.append((as_[p:], bs[p:]))
                for v in as_[p + 1 :]:
                    del pos_a[v]
                for v in bs[p:]:
                    del pos_b[v]
                del as_[p + 1 :]
                del bs[p:]
            else:
                pos_a[a2] = len(as_)
                as_.append(a2)
    return cycles


def _resolve_cycle(rows: list[int], as_: list[int], bs: list[int], allowed: PairPredicate | None) -> list[SwitchMove] | None:
    """Toggle one alternating cycle of ``rows`` in place using at most
    ``len(as_) - 1`` switches, touching only allowed pairs.

    Returns None (rows untouched) when no allowed chord exists.
    """
    t = len(as_)
    if t == 2:
        m = SwitchMove(as_[0], as_[1], bs[0], bs[1])
        for i, j in m.removed + m.added:
            rows[i - 1] ^= 1 << (j - 1)
        return [m]
    for p in range(t):
        for d in range(1, t - 1):
            q = (p + d) % t
            ap, bq = as_[p], bs[q]
            if allowed is not None and not allowed(ap, bq):
                continue
            idx1 = [(p + s) % t for s in range(d + 1)]
            c1 = ([as_[s] for s in idx1], [bs[s] for s in idx1])
            idx2 = [(q + 1 + s) % t for s in range(t - d - 1)]
            c2 = ([ap] + [as_[s] for s in idx2], [bq] + [bs[s] for s in idx2])
            chord_in = bool(rows[ap - 1] >> (bq - 1) & 1)
            order = (c2, c1) if chord_in else (c1, c2)
            moves = []
            for sub_as, sub_bs in order:
                sub = _resolve_cycle(rows, sub_as, sub_bs, allowed)
                if sub is None:  # only possible for exotic predicates
                    for m in reversed(moves):
                        for i, j in m.removed + m.added:
                            rows[i - 1] ^= 1 << (j - 1)
                    break
                moves.extend(sub)
            else:
                return moves
    return None


def switch_sequence(X: Realization, Y: Realization, allowed: PairPredicate | None = None) -> list[SwitchMove]:
    """Switches turning ``X`` into ``Y``, at most ``|E(X △ Y)| / 2`` of them.

    Each alternating cycle of length ``2t`` in the symmetric difference is
    split along chords until only 4-cycles remain, costing ``t - 1`` switches.
    With ``allowed`` given, chords (and therefore every toggled pair) are
    restricted to allowed pairs; the pairs of ``X △ Y`` must themselves be
    allowed.
    """
    _same_shape(X, Y)
    if X.degree_sequence() != Y.degree_sequence():
        raise DegreeMismatch("realizations have different degree sequences")
    rows = list(X.rows)
    moves: list[SwitchMove] = []
    for as_, bs in alternating_cycles(X, Y):
        sub = _resolve_cycle(rows, as_, bs, allowed)
        if sub is None:
            start = Realization(X.nA, X.nB, tuple(rows))
            target = start.toggled([(a, b) for a, b in zip(as_, bs)] + [(as_[(s + 1) % len(as_)], bs[s]) for s in range(len(bs))])
            sub = bfs_switch_path(start, target, allowed)
            for m in sub:
                for i, j in m.removed + m.added:
                    rows[i - 1] ^= 1 << (j - 1)
        moves.extend(sub)
    assert tuple(rows) == Y.rows
    return moves


def bfs_switch_path(X: Realization, Y: Realization, allowed: PairPredicate | None = None, max_states: int = 200_000) -> list[SwitchMove]:
    """Shortest switch path by breadth-first search in the Markov graph,
    optionally restricted to switches whose four pairs are all allowed."""
    if X == Y:
        return []
    parent: dict[Realization, tuple[Realization, SwitchMove] | None] = {X: None}
    queue = deque([X])
    while queue:
        G = queue.popleft()
        for m in valid_switches(G):
            if allowed is not None and not all(allowed(i, j) for i, j in m.removed + m.added):
                continue
            H = G.toggled(m.removed + m.added)
            if H in parent:
                continue
            parent[H] = (G, m)
            if H == Y:
                path = []
                while parent[H] is not None:
                    H, mv = parent[H]
                    path.append(mv)
                return path[::-1]
            if len(parent) > max_states:
                raise OracleLimitExceeded(f"switch BFS exceeded {max_states} states")
            queue.append(H)
    raise DegreeMismatch("target not reachable with the allowed switches")
