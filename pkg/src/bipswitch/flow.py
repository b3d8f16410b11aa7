"""Half-graphs, the oriented network ``F_n`` and flow representations.

``F_n`` has the arc ``a_i -> b_j`` when ``i <= j`` and ``b_j -> a_i`` when
``j < i``; every unordered pair ``{a_i, b_j}`` therefore carries exactly one
arc and a flow is identified with a set of pairs.  Vertices are tagged tuples
``("a", i)`` / ``("b", j)``.

Excess is out-degree minus in-degree, so sources are positive.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .bigraph import DegreeSequence, Pair, Realization
from .errors import BufferInfeasible, DegreeMismatch, DomainError, InadmissibleFlow

Vertex = tuple[str, int]


def halfgraph(n: int) -> Realization:
    if n < 1:
        raise DomainError("n must be positive")
    return Realization(n, n, tuple(((1 << n) - 1) ^ ((1 << i) - 1) for i in range(n)))


def h0_sequence(n: int) -> DegreeSequence:
    return DegreeSequence(range(n, 0, -1), range(1, n + 1))


def hk_sequence(n: int, k: int) -> DegreeSequence:
    """``h_0(n)`` with ``k`` removed from ``a_1`` and from ``b_n``."""
    if n < 1 or k < 0:
        raise DomainError("need n >= 1 and k >= 0")
    if k and k >= n:
        raise DomainError(f"h_k(n) needs k < n (got k={k}, n={n})")
    degA = [n - i for i in range(n)]
    degB = [i + 1 for i in range(n)]
    degA[0] -= k
    degB[-1] -= k
    return DegreeSequence(degA, degB)


def g_sequence(n: int) -> DegreeSequence:
    """The doubled half-graph sequence whose realizations form an ``n``-cube."""
    degA = [x for t in range(n) for x in (2 * t + 1,) * 2]
    return DegreeSequence(degA, degA[::-1])


def arc(i: int, j: int) -> tuple[Vertex, Vertex]:
    """Orientation of the pair ``{a_i, b_j}`` in ``F_n``."""
    return (("a", i), ("b", j)) if i <= j else (("b", j), ("a", i))


@dataclass(frozen=True)
class ExcessProfile:
    n: int
    values: Mapping[Vertex, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", {v: int(x) for v, x in sorted(self.values.items()) if x})

    def __getitem__(self, v: Vertex) -> int:
        return self.values.get(v, 0)

    def __eq__(self, other):
        return isinstance(other, ExcessProfile) and self.n == other.n and self.values == other.values

    def __hash__(self):
        return hash((self.n, tuple(self.values.items())))

    @property
    def k(self) -> int:
        return sum(x for x in self.values.values() if x > 0)

    @property
    def sources(self) -> dict[Vertex, int]:
        return {v: x for v, x in self.values.items() if x > 0}

    @property
    def sinks(self) -> dict[Vertex, int]:
        return {v: -x for v, x in self.values.items() if x < 0}

    def to_dict(self) -> dict[str, int]:
        return {f"{s}{i}": x for (s, i), x in self.values.items()}


def excess_profile(d: DegreeSequence) -> ExcessProfile:
    if d.nA != d.nB:
        raise DomainError("flow representation needs |A| == |B|")
    n = d.nA
    vals = {("a", i): (n + 1 - i) - d.degA[i - 1] for i in range(1, n + 1)}
    vals.update({("b", j): d.degB[j - 1] - j for j in range(1, n + 1)})
    return ExcessProfile(n, vals)


def balance(n: int, pairs: Iterable[Pair]) -> dict[Vertex, int]:
    """Out-degree minus in-degree of the oriented pairs."""
    out: dict[Vertex, int] = {}
    for i, j in pairs:
        u, v = arc(i, j)
        out[u] = out.get(u, 0) + 1
        out[v] = out.get(v, 0) - 1
    return {v: x for v, x in out.items() if x}


@dataclass(frozen=True)
class FlowRep:
    n: int
    arcs: frozenset[Pair]
    excess: ExcessProfile

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset(self.arcs))

    @property
    def k(self) -> int:
        return self.excess.k

    def directed_arcs(self) -> list[tuple[Vertex, Vertex]]:
        return [arc(i, j) for i, j in sorted(self.arcs)]

    def check(self) -> None:
        """Raise InadmissibleFlow unless arcs lie in ``F_n`` and balances match."""
        for i, j in self.arcs:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise InadmissibleFlow(f"pair a{i} b{j} outside F_{self.n}")
        if balance(self.n, self.arcs) != dict(self.excess.values):
            raise InadmissibleFlow("vertex balances do not match the declared excess")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "arcs": [[u[0], u[1], v[0], v[1]] for u, v in self.directed_arcs()],
            "excess": self.excess.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "FlowRep":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        pairs = set()
        for s, x, t, y in data["arcs"]:
            u, v = (s, int(x)), (t, int(y))
            i, j = (u[1], v[1]) if u[0] == "a" else (v[1], u[1])
            if {u[0], v[0]} != {"a", "b"} or arc(i, j) != (u, v):
                raise InadmissibleFlow(f"arc {u}->{v} is not an arc of F_{n}")
            if (i, j) in pairs:
                raise InadmissibleFlow(f"arc {u}->{v} repeated (capacity 1)")
            pairs.add((i, j))
        exc = {(key[0], int(key[1:])): x for key, x in data.get("excess", {}).items()}
        return cls(n, frozenset(pairs), ExcessProfile(n, exc))


@lru_cache(maxsize=1 << 16)
def _flow_pairs(rows: tuple[int, ...], n: int) -> frozenset[Pair]:
    h = halfgraph(n).rows
    return frozenset(
        (i + 1, j + 1) for i in range(n) for j in range(n) if (rows[i] ^ h[i]) >> j & 1
    )


def flow_representation(G: Realization) -> FlowRep:
    """``G △ H_0(n)`` oriented along ``F_n``."""
    if G.nA != G.nB:
        raise DomainError("flow representation needs |A| == |B|")
    return FlowRep(G.nA, _flow_pairs(G.rows, G.nA), excess_profile(G.degree_sequence()))


def flow_to_realization(W: FlowRep) -> Realization:
    W.check()
    return halfgraph(W.n).toggled(W.arcs) if W.n else Realization.empty(0, 0)


# ------------------------------------------------------------ feasible flows


@dataclass(frozen=True)
class FlowSearch:
    """Outcome of :func:`feasible_flow`: a flow, or a set ``S`` violating the
    cut condition (allowed arcs leaving ``S`` < total excess inside ``S``)."""

    flow: FlowRep | None
    cut: frozenset[Vertex] | None = None

    def __bool__(self):
        return self.flow is not None


def _vid(v: Vertex, n: int) -> int:
    return v[1] - 1 if v[0] == "a" else n + v[1] - 1


def _vert(x: int, n: int) -> Vertex:
    return ("a", x + 1) if x < n else ("b", x - n + 1)


def feasible_flow(n: int, allowed: Callable[[int, int], bool] | Iterable[Pair], excess: ExcessProfile | Mapping[Vertex, int]) -> FlowSearch:
    """Integer unit-capacity flow on the allowed part of ``F_n`` meeting ``excess``.

    Reduced to max-flow from a super-source feeding the positive-excess
    vertices to a super-sink draining the negative ones; augmenting paths are
    found by BFS.  ``allowed`` is a pair predicate or an explicit pair set.
    """
    ex = excess if isinstance(excess, ExcessProfile) else ExcessProfile(n, excess)
    if sum(ex.values.values()) != 0:
        raise DomainError("excesses must sum to zero")
    if callable(allowed):
        pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if allowed(i, j)]
    else:
        pairs = sorted(set(allowed))
    s, t = 2 * n, 2 * n + 1
    adj: list[list[int]] = [[] for _ in range(2 * n + 2)]
    cap: dict[tuple[int, int], int] = {}

    def add(u, v, c):
        if (u, v) not in cap:
            adj[u].append(v)
            adj[v].append(u)
            cap[(u, v)] = 0
            cap.setdefault((v, u), 0)
        cap[(u, v)] += c

    for i, j in pairs:
        u, v = arc(i, j)
        add(_vid(u, n), _vid(v, n), 1)
    for v, x in ex.values.items():
        if x > 0:
            add(s, _vid(v, n), x)
        else:
            add(_vid(v, n), t, -x)

    need = ex.k
    got = 0
    while got < need:
        prev = {s: s}
        q = deque([s])
        while q and t not in prev:
            u = q.popleft()
            for v in adj[u]:
                if v not in prev and cap[(u, v)] > 0:
                    prev[v] = u
                    q.append(v)
        if t not in prev:
            cut = frozenset(_vert(x, n) for x in prev if x != s)
            return FlowSearch(None, cut)
        v = t
        while v != s:
            u = prev[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        got += 1

    used = set()
    for i, j in pairs:
        u, v = arc(i, j)
        if cap[(_vid(u, n), _vid(v, n))] == 0:
            used.add((i, j))
    return FlowSearch(FlowRep(n, frozenset(used), ex))


def cut_deficit(n: int, allowed: Callable[[int, int], bool] | Iterable[Pair], excess: ExcessProfile, S: Iterable[Vertex]) -> int:
    """``delta(S) - sum of excess over S``; negative means ``S`` violates the cut condition."""
    S = set(S)
    pairs = (
        [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if allowed(i, j)]
        if callable(allowed)
        else set(allowed)
    )
    leaving = sum(1 for i, j in pairs if (lambda uv: uv[0] in S and uv[1] not in S)(arc(i, j)))
    return leaving - sum(excess[v] for v in S)


# ------------------------------------------------------------------ buffers


def buffer_width(k: int) -> int:
    """Smallest integer width allowed by ``z >= 2k + sqrt(2k) + 1``."""
    z = 2 * k + 1
    while (z - 2 * k - 1) ** 2 < 2 * k:
        z += 1
    return z


def _induced_equal(X: Realization, Y: Realization, lo: int, hi: int) -> bool:
    """Do X and Y induce the same graph on pairs with index in ``[lo, hi]``?"""
    if lo > hi:
        return True
    mask = ((1 << hi) - 1) ^ ((1 << (lo - 1)) - 1)
    return all((X.rows[i - 1] ^ Y.rows[i - 1]) & mask == 0 for i in range(lo, hi + 1))


def agrees_outside(T: Realization, left: Realization, right: Realization, i: int, j: int) -> bool:
    """T matches ``left`` on ``U_i`` and ``right`` on the complement of ``U_j``."""
    return _induced_equal(T, left, 1, i) and _induced_equal(T, right, j + 1, T.nA)


def build_buffer(X: Realization, Y: Realization, i: int, z: int) -> Realization:
    """A realization of the common degree sequence that agrees with ``Y`` on
    ``U_i`` and with ``X`` on the complement of ``U_{i+z}``.

    The flow of ``Y`` leaving ``U_i`` is rerouted through the window
    ``i+1..i+z`` into the flow of ``X`` entering the right part.  The window
    network excludes every pair between the boundary vertex sets; if that is
    infeasible (narrow windows) the cross pairs between the left and right
    boundary sets are admitted as well.
    """
    n = X.nA
    if (X.nB, Y.nA, Y.nB) != (n, n, n):
        raise DomainError("buffers need n x n realizations")
    d = X.degree_sequence()
    if Y.degree_sequence() != d:
        raise DegreeMismatch("X and Y realize different sequences")
    if not 0 <= i <= n - z or z < 0:
        raise DomainError(f"need 0 <= i <= n - z (i={i}, z={z}, n={n})")
    hi = i + z
    left = frozenset(pq for pq in _flow_pairs(Y.rows, n) if min(pq) <= i)
    right = frozenset(pq for pq in _flow_pairs(X.rows, n) if max(pq) > hi)
    rows = _buffer_rows(d, left, right, i, z)
    if rows is None:
        raise BufferInfeasible(f"no buffer for window [{i + 1}, {hi}]")
    T = Realization(n, n, rows)
    if T.degree_sequence() != d or not agrees_outside(T, Y, X, i, hi):
        raise BufferInfeasible(f"buffer for window [{i + 1}, {hi}] failed validation")
    return T


@lru_cache(maxsize=1 << 18)
def _buffer_rows(d: DegreeSequence, left: frozenset[Pair], right: frozenset[Pair], i: int, z: int) -> tuple[int, ...] | None:
    """Buffer rows from the only data they depend on: the left flow touching
    ``U_i`` and the right flow touching the complement of ``U_{i+z}``."""
    n = d.nA
    hi = i + z
    ex = excess_profile(d)

    f: dict[Vertex, int] = {}
    for p, q in left:
        if max(p, q) > i:  # leaves U_i; tail is the lower-index end
            tail = arc(p, q)[0]
            f[tail] = f.get(tail, 0) + 1
    for p, q in right:
        if min(p, q) <= hi:  # enters the right part
            head = arc(p, q)[1]
            f[head] = f.get(head, 0) - 1
    outer_left = {v for v in f if v[1] <= i}
    outer_right = {v for v in f if v[1] > hi}
    outer = outer_left | outer_right
    for idx in range(i + 1, hi + 1):
        f[("a", idx)] = ex[("a", idx)]
        f[("b", idx)] = ex[("b", idx)]

    def in_net(v: Vertex) -> bool:
        return i < v[1] <= hi or v in f

    def strict(p: int, q: int) -> bool:
        a, b = ("a", p), ("b", q)
        return in_net(a) and in_net(b) and not (a in outer and b in outer)

    def relaxed(p: int, q: int) -> bool:
        a, b = ("a", p), ("b", q)
        return strict(p, q) or (a in outer_left and b in outer_right) or (a in outer_right and b in outer_left)

    fixed = {pq for pq in left if max(pq) <= i} | {pq for pq in right if min(pq) > hi}
    for allowed in (strict, relaxed):
        res = feasible_flow(n, allowed, f)
        if not res:
            continue
        T = halfgraph(n).toggled(fixed | res.flow.arcs)
        if T.degree_sequence() == d:
            return T.rows
    return None


def enumerate_flows(n: int, excess: ExcessProfile | Mapping[Vertex, int], limit: int = 1_000_000) -> list[frozenset[Pair]]:
    """All unit-capacity flows on ``F_n`` with the given excess, by brute force.

    ``F_n`` is acyclic with topological order ``a_1, b_1, a_2, b_2, ...``;
    vertices are visited in that order and, with the inflow already fixed,
    every subset of out-arcs of the required size is tried.  Independent of
    realization enumeration, so it serves as a cross-check of the bijection.
    """
    from itertools import combinations

    ex = excess if isinstance(excess, ExcessProfile) else ExcessProfile(n, excess)
    order = [v for i in range(1, n + 1) for v in (("a", i), ("b", i))]
    outs: dict[Vertex, list[tuple[Vertex, Pair]]] = {v: [] for v in order}
    ins_left: dict[Vertex, int] = {v: 0 for v in order}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            u, v = arc(i, j)
            outs[u].append((v, (i, j)))
            ins_left[v] += 1
    inflow = {v: 0 for v in order}
    chosen: list[Pair] = []
    found: list[frozenset[Pair]] = []

    def rec(t: int) -> None:
        if t == len(order):
            found.append(frozenset(chosen))
            if len(found) > limit:
                raise OverflowError("flow enumeration limit exceeded")
            return
        v = order[t]
        need = inflow[v] + ex[v]
        arcs_out = outs[v]
        if need < 0 or need > len(arcs_out):
            return
        for sub in combinations(arcs_out, need):
            for w, _ in arcs_out:
                ins_left[w] -= 1
            for w, _ in sub:
                inflow[w] += 1
            # a head must still reach its required inflow and not exceed its out-arcs
            ok = all(
                inflow[w] + ins_left[w] + ex[w] >= 0 and inflow[w] + ex[w] <= len(outs[w])
                for w, _ in arcs_out
            )
            if ok:
                chosen.extend(p for _, p in sub)
                rec(t + 1)
                del chosen[len(chosen) - need:]
            for w, _ in sub:
                inflow[w] -= 1
            for w, _ in arcs_out:
                ins_left[w] += 1

    rec(0)
    return found
