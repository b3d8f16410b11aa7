"""Canonical switch paths between realizations of a sequence near the half-graph.

Between ``X`` and ``Y`` the path runs through buffer realizations whose
window slides from left to right.  Every segment between consecutive
milestones keeps a prefix ``U_base`` and everything right of
``base + w`` fixed, where ``w = 3k + 2``; a state on that segment is encoded by
``(reverse buffer, compressed X window, compressed Y window, base)`` and
together with the state this determines ``X`` and ``Y``.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field

from .bigraph import (
    DEFAULT_ORACLE_LIMIT,
    DegreeSequence,
    Realization,
    SwitchMove,
    apply_switch,
    enumerate_realizations,
    is_valid_switch,
    switch_sequence,
)
from .chain import sinclair_bound, switch_probability
from .errors import DegreeMismatch, DomainError, InconsistentEncoding, InvalidMove, TooSmall
from .flow import Vertex, _flow_pairs, arc, build_buffer, excess_profile, halfgraph


def left_compress(G: Realization, R) -> Realization:
    """Edges of ``G[R]`` with the pairs ``(a_i, b_i)`` meeting ``R`` renumbered ``1..r`` in order."""
    R = set(R)
    idx = sorted({v[1] for v in R})
    pos = {i: t for t, i in enumerate(idx, 1)}
    edges = [
        (pos[i], pos[j])
        for i in idx if ("a", i) in R
        for j in idx if ("b", j) in R and G.has_edge(i, j)
    ]
    return Realization.from_edges(len(idx), len(idx), edges)


def window_width(n: int, k: int) -> int:
    """Segment window ``3k + 2``, or the whole index range when too short for milestones."""
    return 3 * k + 2 if n >= 3 * k + 4 else n


def _check_pair(X: Realization, Y: Realization, k: int | None) -> tuple[DegreeSequence, int]:
    if X.nA != X.nB or (Y.nA, Y.nB) != (X.nA, X.nB):
        raise DomainError("need n x n realizations of the same shape")
    d = X.degree_sequence()
    if Y.degree_sequence() != d:
        raise DegreeMismatch("X and Y realize different sequences")
    kk = excess_profile(d).k
    if k is not None and k != kk:
        raise DomainError(f"sequence lies at excess {kk}, not {k}")
    return d, kk


# ----------------------------------------------------------------- milestones


@dataclass(frozen=True)
class Milestone:
    label: str
    state: Realization


@dataclass(frozen=True)
class MilestoneSchedule:
    k: int
    milestones: tuple[Milestone, ...]
    bases: tuple[int, ...]  # bases[s] belongs to the segment milestones[s] -> milestones[s+1]

    @property
    def realizations(self) -> list[Realization]:
        return [m.state for m in self.milestones]

    def __len__(self):
        return len(self.milestones)


def milestones(X: Realization, Y: Realization, k: int | None = None) -> MilestoneSchedule:
    """X, the buffers ``T[2,3k+2]``, then ``T[i+1,i+3k+2]`` and ``T[i+2,i+3k+2]``
    for ``i = 1..n-3k-3``, then Y.  ``T[a,b]`` agrees with Y on ``U_{a-1}`` and
    with X beyond ``b``."""
    d, k = _check_pair(X, Y, k)
    n = X.nA
    if n < 3 * k + 4:
        raise TooSmall(f"milestones need n >= 3k+4 (n={n}, k={k})")

    def T(a: int, b: int) -> Milestone:
        return Milestone(f"T[{a},{b}]", build_buffer(X, Y, a - 1, b - a + 1))

    ms = [Milestone("X", X), T(2, 3 * k + 2)]
    bases = [0]
    for i in range(1, n - 3 * k - 2):
        ms += [T(i + 1, i + 3 * k + 2), T(i + 2, i + 3 * k + 2)]
        bases += [i, i]
    ms.append(Milestone("Y", Y))
    bases.append(n - 3 * k - 2)
    return MilestoneSchedule(k, tuple(ms), tuple(bases))


# ------------------------------------------------------------------ encodings


@dataclass(frozen=True)
class Encoding:
    reverse_buffer: Realization
    gx: Realization
    gy: Realization
    index: int

    def key(self):
        return (self.reverse_buffer.rows, self.gx.nA, self.gx.rows, self.gy.nA, self.gy.rows, self.index)

    def to_dict(self) -> dict:
        return {
            "reverseBuffer": self.reverse_buffer.edges(),
            "gx": {"r": self.gx.nA, "edges": self.gx.edges()},
            "gy": {"r": self.gy.nA, "edges": self.gy.edges()},
            "index": self.index,
        }


def _boundary(d: DegreeSequence, left: Realization, right: Realization, base: int, hi: int) -> set[Vertex]:
    """Vertices of a realization's window neighbourhood, read off from the
    realization's prefix (``left``) and suffix (``right``) and the excesses of
    ``d``: tails of flow leaving ``U_base``, heads of flow entering past ``hi``,
    and the window itself."""
    n = d.nA
    ex = excess_profile(d)
    R: set[Vertex] = set()
    for idx in range(base + 1, hi + 1):
        R.add(("a", idx))
        R.add(("b", idx))
    bal: dict[Vertex, int] = {}
    for p, q in _flow_pairs(left.rows, n):
        if p <= base and q <= base:
            u, v = arc(p, q)
            bal[u] = bal.get(u, 0) + 1
            bal[v] = bal.get(v, 0) - 1
    for idx in range(1, base + 1):
        for v in (("a", idx), ("b", idx)):
            if ex[v] - bal.get(v, 0) > 0:
                R.add(v)
    bal = {}
    for p, q in _flow_pairs(right.rows, n):
        if p > hi and q > hi:
            u, v = arc(p, q)
            bal[u] = bal.get(u, 0) + 1
            bal[v] = bal.get(v, 0) - 1
    for idx in range(hi + 1, n + 1):
        for v in (("a", idx), ("b", idx)):
            if ex[v] - bal.get(v, 0) < 0:
                R.add(v)
    return R


def reverse_buffer(X: Realization, Y: Realization, base: int, w: int) -> Realization:
    """Agrees with X on ``U_base`` and with Y past ``base + w``."""
    n = X.nA
    if base == 0:
        return Y
    if base + w >= n:
        return X
    return build_buffer(Y, X, base, w)


def encoding(X: Realization, Y: Realization, base: int, w: int | None = None) -> Encoding:
    d = X.degree_sequence()
    n = X.nA
    w = window_width(n, excess_profile(d).k) if w is None else w
    hi = base + w
    rb = reverse_buffer(X, Y, base, w)
    gx = left_compress(X, _boundary(d, X, X, base, hi))
    gy = left_compress(Y, _boundary(d, Y, Y, base, hi))
    return Encoding(rb, gx, gy, base)


def _decode_one(d: DegreeSequence, left: Realization, right: Realization, g: Realization, base: int, hi: int) -> Realization:
    n = d.nA
    R = _boundary(d, left, right, base, hi)
    idx = sorted({v[1] for v in R})
    if g.nA != len(idx) or g.nB != len(idx):
        raise InconsistentEncoding(f"compressed graph has {g.nA} pairs, window needs {len(idx)}")
    h = halfgraph(n).rows
    full = (1 << n) - 1
    lmask = (1 << base) - 1
    rmask = full ^ ((1 << hi) - 1)
    bmask = 0
    for s, i in R:
        if s == "b":
            bmask |= 1 << (i - 1)
    expand = []
    for r in g.rows:
        x = 0
        for t, i in enumerate(idx):
            if r >> t & 1:
                x |= 1 << (i - 1)
        expand.append(x)
    pos = {i: t for t, i in enumerate(idx)}
    rows = []
    for p in range(1, n + 1):
        fixed_mask = lmask if p <= base else rmask if p > hi else 0
        src = left if p <= base else right
        row = src.rows[p - 1] & fixed_mask
        rest = full & ~fixed_mask
        if ("a", p) in R:
            row |= h[p - 1] & rest & ~bmask
            row |= expand[pos[p]] & rest & bmask
        else:
            row |= h[p - 1] & rest
        rows.append(row)
    out = Realization(n, n, tuple(rows))
    if out.degree_sequence() != d or left_compress(out, R) != g:
        raise InconsistentEncoding("decoded realization does not match the degree sequence")
    return out


def reconstruct(Z: Realization, L: Encoding, d: DegreeSequence) -> tuple[Realization, Realization]:
    """Recover the endpoints ``(X, Y)`` of the canonical path through ``Z`` encoded by ``L``."""
    n = d.nA
    if Z.degree_sequence() != d or L.reverse_buffer.degree_sequence() != d:
        raise InconsistentEncoding("state or reverse buffer does not realize d")
    w = window_width(n, excess_profile(d).k)
    base = L.index
    if not 0 <= base <= n - w:
        raise InconsistentEncoding(f"index {base} outside 0..{n - w}")
    hi = base + w
    X = _decode_one(d, L.reverse_buffer, Z, L.gx, base, hi)
    Y = _decode_one(d, Z, L.reverse_buffer, L.gy, base, hi)
    return X, Y


# ------------------------------------------------------------------- paths


def _segment_moves(A: Realization, B: Realization, base: int, hi: int) -> list[SwitchMove]:
    def allowed(p: int, q: int) -> bool:
        return not (p <= base and q <= base) and not (p > hi and q > hi)

    return switch_sequence(A, B, allowed)


@dataclass(frozen=True)
class CanonicalPath:
    states: tuple[Realization, ...]
    moves: tuple[SwitchMove, ...]
    encodings: tuple[Encoding, ...]
    segment_lengths: tuple[int, ...] = field(default=())
    milestone_labels: tuple[str, ...] = field(default=())

    def __len__(self):
        return len(self.moves)

    def to_dict(self) -> dict:
        return {
            "moves": [m.to_list() for m in self.moves],
            "segmentLengths": list(self.segment_lengths),
            "milestones": list(self.milestone_labels),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def prune_circuits(states: list[Realization], encs: list[Encoding]) -> tuple[list[Realization], list[Encoding]]:
    """Cut every loop out of the trail, scanning from the front; a revisited
    state keeps the encoding it had on its first visit."""
    out_s: list[Realization] = []
    out_e: list[Encoding] = []
    seen: dict[tuple[int, ...], int] = {}
    for s, e in zip(states, encs):
        at = seen.get(s.rows)
        if at is not None:
            for t in out_s[at + 1:]:
                del seen[t.rows]
            del out_s[at + 1:]
            del out_e[at + 1:]
            continue
        seen[s.rows] = len(out_s)
        out_s.append(s)
        out_e.append(e)
    return out_s, out_e


def _move_between(A: Realization, B: Realization) -> SwitchMove:
    diff = A.symmetric_difference(B)
    removed = [p for p in diff if A.has_edge(*p)]
    (a1, b1), (a2, b2) = sorted(removed)
    return SwitchMove(a1, a2, b1, b2)


def canonical_path(X: Realization, Y: Realization, k: int | None = None) -> CanonicalPath:
    """Designated switch path from X to Y with an encoding for each state."""
    d, k = _check_pair(X, Y, k)
    n = X.nA
    if X == Y:
        return CanonicalPath((X,), (), (encoding(X, Y, 0),), (), ("X",))
    w = window_width(n, k)
    if n < 3 * k + 4:
        sched = [(X, Y, 0)]
        labels = ("X", "Y")
    else:
        ms = milestones(X, Y, k)
        sched = [(ms.milestones[s].state, ms.milestones[s + 1].state, b) for s, b in enumerate(ms.bases)]
        labels = tuple(m.label for m in ms.milestones)
    enc_cache: dict[int, Encoding] = {}
    states = [X]
    encs: list[Encoding] = []
    seg_len = []
    for A, B, base in sched:
        if base not in enc_cache:
            enc_cache[base] = encoding(X, Y, base, w)
        L = enc_cache[base]
        if not encs:
            encs.append(L)
        moves = _segment_moves(A, B, base, base + w)
        seg_len.append(len(moves))
        cur = A
        for m in moves:
            cur = apply_switch(cur, m)
            states.append(cur)
            encs.append(L)
        assert cur == B
    states, encs = prune_circuits(states, encs)
    moves = tuple(_move_between(states[t], states[t + 1]) for t in range(len(states) - 1))
    return CanonicalPath(tuple(states), moves, tuple(encs), tuple(seg_len), labels)


def validate_path(path: CanonicalPath, X: Realization, Y: Realization) -> None:
    """Raise InvalidMove unless the path runs X to Y by valid switches without repeats."""
    st = path.states
    if st[0] != X or st[-1] != Y:
        raise InvalidMove("path endpoints differ from (X, Y)")
    if len({s.rows for s in st}) != len(st):
        raise InvalidMove("path revisits a realization")
    if len(path.encodings) != len(st):
        raise InvalidMove("every state needs an encoding")
    for t, m in enumerate(path.moves):
        if not (is_valid_switch(st[t], m) and apply_switch(st[t], m) == st[t + 1]):
            raise InvalidMove(f"step {t} is not a switch")


# --------------------------------------------------------------------- load


@dataclass(frozen=True)
class LoadReport:
    state_count: int
    n: int
    k: int
    rho: float
    ell: int
    distinct_encodings: int
    edge_counts: tuple[tuple[int, int, int], ...]  # (from state, to state, paths)
    edge_probability: float
    max_segment: int
    reconstruct_checked: int

    @property
    def encoding_constant(self) -> float:
        """Distinct encodings per ``|G(d)| * n``."""
        return self.distinct_encodings / (self.state_count * self.n) if self.state_count else 0.0

    def sinclair(self, eps: float) -> float:
        return sinclair_bound(self.rho, self.ell, self.state_count, eps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge", "from", "to", "paths", "load"])
        denom = self.state_count * self.edge_probability
        for e, (x, y, c) in enumerate(self.edge_counts):
            w.writerow([e, x, y, c, f"{c / denom:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "stateCount": self.state_count,
            "n": self.n,
            "k": self.k,
            "rho": self.rho,
            "ell": self.ell,
            "distinctEncodings": self.distinct_encodings,
            "encodingConstant": self.encoding_constant,
            "comparison": self.state_count * self.n,
            "maxSegment": self.max_segment,
            "reconstructChecked": self.reconstruct_checked,
        }


def measure_load(d: DegreeSequence, k: int | None = None, limit: int = DEFAULT_ORACLE_LIMIT, check: bool = False) -> LoadReport:
    """Exact load of the canonical path system over all ordered pairs.

    With ``check`` every (state, encoding) pair is decoded and compared with
    the path's endpoints.
    """
    if d.nA != d.nB:
        raise DomainError("need |A| == |B|")
    kk = excess_profile(d).k
    if k is not None and k != kk:
        raise DomainError(f"sequence lies at excess {kk}, not {k}")
    states = enumerate_realizations(d, limit)
    index = {G.rows: x for x, G in enumerate(states)}
    counts: Counter = Counter()
    encs = set()
    ell = 0
    max_seg = 0
    checked = 0
    for X in states:
        for Y in states:
            if X == Y:
                continue
            path = canonical_path(X, Y, kk)
            ell = max(ell, len(path))
            max_seg = max([max_seg, *path.segment_lengths])
            for t in range(len(path.states) - 1):
                counts[(index[path.states[t].rows], index[path.states[t + 1].rows])] += 1
            if check:
                validate_path(path, X, Y)
            for Z, L in zip(path.states, path.encodings):
                encs.add(L.key())
                if check:
                    if reconstruct(Z, L, d) != (X, Y):
                        raise InconsistentEncoding("reconstruction disagrees with the path endpoints")
                    checked += 1
    m = len(states)
    p = switch_probability(d.nA, d.nB)
    rho = max(counts.values()) / (m * p) if counts else 0.0
    edges = tuple(sorted((x, y, c) for (x, y), c in counts.items()))
    return LoadReport(m, d.nA, kk, rho, ell, len(encs), edges, p, max_seg, checked)
