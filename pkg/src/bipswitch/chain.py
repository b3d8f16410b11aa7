"""The bipartite switch Markov chain: sampler and exact small-scale diagnostics.

A step draws one of ``6 * C(N, 4)`` equally likely slots (``N = nA + nB``).
The first ``2 * C(nA, 2) * C(nB, 2)`` slots are (A-pair, B-pair, orientation)
triples; a slot whose 2x2 pattern is the matching named by its orientation
is switched, every other slot leaves the state alone.  Each valid switch is
therefore taken with probability ``1 / (6 * C(N, 4))``.
"""
from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numba
import numpy as np

from .bigraph import (
    DEFAULT_ORACLE_LIMIT,
    DegreeSequence,
    Realization,
    SwitchMove,
    enumerate_realizations,
    havel_hakimi,
    switch_neighbors,
)
from .errors import DomainError, OracleLimitExceeded

MAX_EXACT_STATES = 5000
_CHUNK = 1 << 18


@dataclass(frozen=True)
class ChainConfig:
    seed: int = 0
    steps: int = 0
    report_every: int = 0

    def __post_init__(self):
        if self.steps < 0 or self.report_every < 0:
            raise DomainError("steps and report_every must be nonnegative")
        if not 0 <= self.seed < 1 << 64:
            raise DomainError("seed must fit in 64 bits")


def slot_count(nA: int, nB: int) -> int:
    return 6 * math.comb(nA + nB, 4)


def switch_probability(nA: int, nB: int) -> float:
    return 1.0 / slot_count(nA, nB)


@dataclass(frozen=True)
class _Slots:
    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    total: int
    bipartite: int


@lru_cache(maxsize=64)
def _slots(nA: int, nB: int) -> _Slots:
    pa = list(combinations(range(nA), 2))
    pb = list(combinations(range(nB), 2))
    arr = lambda xs: np.array(xs, dtype=np.int64) if xs else np.zeros(0, dtype=np.int64)
    return _Slots(
        arr([p[0] for p in pa]), arr([p[1] for p in pa]),
        arr([p[0] for p in pb]), arr([p[1] for p in pb]),
        slot_count(nA, nB), 2 * len(pa) * len(pb),
    )


def decode_slot(u: int, nA: int, nB: int) -> SwitchMove | None:
    """The oriented move named by slot ``u`` (vertices 1-indexed), or None for a lazy slot."""
    s = _slots(nA, nB)
    if u >= s.bipartite:
        return None
    nbp = len(s.b1)
    ia, rem = divmod(u, 2 * nbp)
    ib, o = divmod(rem, 2)
    a1, a2 = int(s.a1[ia]) + 1, int(s.a2[ia]) + 1
    b1, b2 = int(s.b1[ib]) + 1, int(s.b2[ib]) + 1
    return SwitchMove(a1, a2, b1, b2) if o == 0 else SwitchMove(a1, a2, b2, b1)


def _apply_slot(rows: list[int], u: int, s: _Slots) -> bool:
    if u >= s.bipartite:
        return False
    nbp = len(s.b1)
    ia, rem = divmod(u, 2 * nbp)
    ib, o = divmod(rem, 2)
    a1, a2, b1, b2 = int(s.a1[ia]), int(s.a2[ia]), int(s.b1[ib]), int(s.b2[ib])
    if o:
        b1, b2 = b2, b1
    r1, r2 = rows[a1], rows[a2]
    if (r1 >> b1 & 1) and (r2 >> b2 & 1) and not (r1 >> b2 & 1) and not (r2 >> b1 & 1):
        m = (1 << b1) | (1 << b2)
        rows[a1] ^= m
        rows[a2] ^= m
        return True
    return False


def chain_step(G: Realization, rng: np.random.Generator) -> Realization:
    """One step of the chain from ``G``."""
    s = _slots(G.nA, G.nB)
    if s.total == 0:
        return G
    rows = list(G.rows)
    if _apply_slot(rows, int(rng.integers(s.total)), s):
        return Realization(G.nA, G.nB, tuple(rows))
    return G


@numba.njit(cache=True)
def _run_slots(rows, us, a1s, a2s, b1s, b2s, bipartite, nbp):
    """Apply pre-drawn slots to uint64 bit rows in place; returns accepted count."""
    acc = 0
    one = np.uint64(1)
    for t in range(us.shape[0]):
        u = us[t]
        if u >= bipartite:
            continue
        ia = u // (2 * nbp)
        rem = u - ia * 2 * nbp
        ib = rem >> 1
        a1 = a1s[ia]
        a2 = a2s[ia]
        b1 = b1s[ib]
        b2 = b2s[ib]
        if rem & 1:
            b1, b2 = b2, b1
        m1 = one << np.uint64(b1)
        m2 = one << np.uint64(b2)
        r1 = rows[a1]
        r2 = rows[a2]
        if (r1 & m1) and (r2 & m2) and not (r1 & m2) and not (r2 & m1):
            rows[a1] = r1 ^ (m1 | m2)
            rows[a2] = r2 ^ (m1 | m2)
            acc += 1
    return acc


def _to_array(G: Realization) -> np.ndarray:
    if G.nB > 64:
        raise DomainError("the compiled sampler handles at most 64 B-vertices")
    return np.array(G.rows, dtype=np.uint64)


def _from_array(nA: int, nB: int, rows: np.ndarray) -> Realization:
    return Realization(nA, nB, tuple(int(r) for r in rows))


def run_chain(G: Realization, steps: int, rng: np.random.Generator) -> Realization:
    """Advance ``steps`` steps with the compiled kernel.

    Lazy slots never change the state, so only the number of bipartite slots
    among ``steps`` draws matters: it is drawn as a binomial and then that
    many uniform bipartite slots are applied.  The law of the final state is
    the same as drawing all ``steps`` slots.
    """
    s = _slots(G.nA, G.nB)
    if s.total == 0 or s.bipartite == 0 or steps == 0:
        return G
    rows = _to_array(G)
    left = int(rng.binomial(steps, s.bipartite / s.total))
    while left:
        m = min(left, _CHUNK)
        us = rng.integers(s.bipartite, size=m, dtype=np.int64)
        _run_slots(rows, us, s.a1, s.a2, s.b1, s.b2, s.bipartite, len(s.b1))
        left -= m
    return _from_array(G.nA, G.nB, rows)


def start_state(d: DegreeSequence) -> Realization:
    return havel_hakimi(d)


def sample(d: DegreeSequence, cfg: ChainConfig, start: Realization | None = None) -> Realization:
    """State after ``cfg.steps`` steps from the greedy start (or ``start``)."""
    G = start if start is not None else start_state(d)
    return run_chain(G, cfg.steps, np.random.default_rng(cfg.seed))


def trajectory(d: DegreeSequence, cfg: ChainConfig, start: Realization | None = None):
    """Yield ``(t, state)`` every ``cfg.report_every`` steps, ending at ``cfg.steps``."""
    G = start if start is not None else start_state(d)
    rng = np.random.default_rng(cfg.seed)
    every = cfg.report_every or cfg.steps or 1
    t = 0
    yield t, G
    while t < cfg.steps:
        m = min(every, cfg.steps - t)
        G = run_chain(G, m, rng)
        t += m
        yield t, G


def sample_many(d: DegreeSequence, count: int, steps: int, seed: int, start: Realization | None = None) -> list[Realization]:
    """``count`` independent chains of ``steps`` steps each; one RNG stream per chain."""
    G0 = start if start is not None else start_state(d)
    streams = np.random.SeedSequence(seed).spawn(count)
    return [run_chain(G0, steps, np.random.default_rng(ss)) for ss in streams]


@numba.njit(cache=True)
def _run_many(base, out, us, offsets, a1s, a2s, b1s, b2s, bipartite, nbp):
    for c in range(out.shape[0]):
        rows = base.copy()
        _run_slots(rows, us[offsets[c]:offsets[c + 1]], a1s, a2s, b1s, b2s, bipartite, nbp)
        out[c, :] = rows


def sample_batch(d: DegreeSequence, count: int, steps: int, seed: int, start: Realization | None = None) -> np.ndarray:
    """Rows of ``count`` independent chains as a ``(count, nA)`` uint64 array.

    Same law as :func:`sample_many` with a single RNG stream feeding the
    chains one after another; avoids building Python objects per sample.
    """
    G0 = start if start is not None else start_state(d)
    s = _slots(G0.nA, G0.nB)
    base = _to_array(G0)
    out = np.empty((count, G0.nA), dtype=np.uint64)
    if s.bipartite == 0 or steps == 0:
        out[:] = base
        return out
    rng = np.random.default_rng(seed)
    q = s.bipartite / s.total
    per = max(1, _CHUNK * 16 // max(1, int(steps * q)))
    for lo in range(0, count, per):
        m = min(per, count - lo)
        ks = rng.binomial(steps, q, size=m)
        offsets = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(ks, out=offsets[1:])
        us = rng.integers(s.bipartite, size=int(offsets[-1]), dtype=np.int64)
        _run_many(base, out[lo:lo + m], us, offsets, s.a1, s.a2, s.b1, s.b2, s.bipartite, len(s.b1))
    return out


# ------------------------------------------------------------ exact analysis


@dataclass(frozen=True)
class ChainMatrix:
    states: tuple[Realization, ...]
    P: np.ndarray
    index: dict = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.states)


def transition_matrix(d: DegreeSequence, limit: int = DEFAULT_ORACLE_LIMIT, max_states: int = MAX_EXACT_STATES) -> ChainMatrix:
    states = tuple(enumerate_realizations(d, limit))
    if len(states) > max_states:
        raise OracleLimitExceeded(f"{len(states)} states exceeds the dense limit {max_states}")
    index = {G.rows: x for x, G in enumerate(states)}
    m = len(states)
    P = np.zeros((m, m))
    if m and slot_count(d.nA, d.nB):
        p = switch_probability(d.nA, d.nB)
        for x, G in enumerate(states):
            for H in switch_neighbors(G):
                P[x, index[H.rows]] += p
    P[np.diag_indices(m)] = 1.0 - P.sum(axis=1)
    return ChainMatrix(states, P, index)


def adjacency_lists(cm: ChainMatrix) -> list[list[int]]:
    m = len(cm)
    return [[y for y in np.nonzero(cm.P[x])[0] if y != x] for x in range(m)]


def eccentricities(cm: ChainMatrix) -> list[int]:
    adj = adjacency_lists(cm)
    out = []
    for s in range(len(adj)):
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        out.append(max(dist.values()) if len(dist) == len(adj) else -1)
    return out


def is_connected(cm: ChainMatrix) -> bool:
    return len(cm) <= 1 or min(eccentricities(cm)) >= 0


def is_aperiodic(cm: ChainMatrix) -> bool:
    """A connected chain with a positive diagonal entry is aperiodic."""
    return len(cm) <= 1 or bool((np.diag(cm.P) > 0).any())


def worst_distance(Pt: np.ndarray) -> float:
    """``max_x || P^t(x, .) - pi ||_1`` for the uniform ``pi``."""
    m = Pt.shape[0]
    return float(np.abs(Pt - 1.0 / m).sum(axis=1).max())


def mixing_time(P: np.ndarray, eps: float, max_t: int = 1 << 40) -> int:
    """Least ``t`` with worst-start L1 distance at most ``2 * eps``.

    The distance is non-increasing in ``t``, so doubling brackets ``t`` and a
    binary search over products of the cached squarings pins it down.
    """
    m = P.shape[0]
    if m <= 1 or worst_distance(np.eye(m)) <= 2 * eps:
        return 0
    powers = [P]
    while worst_distance(powers[-1]) > 2 * eps:
        if (1 << len(powers)) > max_t:
            raise DomainError("chain does not mix within the search horizon")
        powers.append(powers[-1] @ powers[-1])
    # answer lies in (2^(j-1), 2^j] with j = len(powers) - 1
    lo_t, lo_M = 0, np.eye(m)
    if len(powers) > 1:
        lo_t, lo_M = 1 << (len(powers) - 2), powers[-2]
    # find the largest t < answer, building it bit by bit from lo_t
    for b in range(len(powers) - 3, -1, -1):
        M = lo_M @ powers[b]
        if worst_distance(M) > 2 * eps:
            lo_t, lo_M = lo_t + (1 << b), M
    return lo_t + 1


@dataclass(frozen=True)
class MixingReport:
    state_count: int
    tau: dict[float, int]
    diameter: int
    spectral_gap: float | None
    curve: tuple[tuple[int, float], ...]
    stationary_error: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "worst_tv"])
        for t, tv in self.curve:
            w.writerow([t, f"{tv:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "stateCount": self.state_count,
            "tauEpsilon": {str(e): t for e, t in self.tau.items()},
            "diameter": self.diameter,
            "spectralGap": self.spectral_gap,
            "stationaryError": self.stationary_error,
        }


def tv_curve(P: np.ndarray, ts: list[int]) -> list[tuple[int, float]]:
    """Worst-start total variation distance at each requested time."""
    out = []
    m = P.shape[0]
    Pt, t = np.eye(m), 0
    for target in sorted(set(ts)):
        Pt = Pt @ np.linalg.matrix_power(P, target - t)
        t = target
        out.append((t, 0.5 * worst_distance(Pt)))
    return out


def exact_mixing(d: DegreeSequence, epsilons=(0.25,), limit: int = DEFAULT_ORACLE_LIMIT) -> MixingReport:
    cm = transition_matrix(d, limit)
    P = cm.P
    m = len(cm)
    tau = {float(e): mixing_time(P, e) for e in sorted(epsilons)}
    ecc = eccentricities(cm)
    gap = None
    if m > 1:
        ev = np.sort(np.linalg.eigvalsh((P + P.T) / 2))
        gap = float(1.0 - ev[-2])
    horizon = max(tau.values(), default=0)
    ts = sorted({0, horizon, *(int(round(horizon * f / 16)) for f in range(17))})
    pi = np.full(m, 1.0 / m) if m else np.zeros(0)
    err = float(np.abs(pi @ P - pi).max()) if m else 0.0
    return MixingReport(m, tau, max(ecc) if m else 0, gap, tuple(tv_curve(P, ts)), err)


def sinclair_bound(rho: float, ell: int, size: int, eps: float) -> float:
    """Canonical-path upper bound on the mixing time."""
    return rho * ell * (math.log(size) + math.log(1.0 / eps))
