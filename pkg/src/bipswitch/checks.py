"""Named verification suites, shared by ``bipswitch check`` and the acceptance tests.

Each suite returns a list of :class:`CheckResult`; a suite passes when all of
its results pass.  Exhaustive enumerations use an oracle limit of 64 cells so
that 8 x 8 sequences are in range.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product

import numpy as np

from .bigraph import DegreeSequence, Realization, enumerate_realizations, is_bigraphic, valid_switches
from .chain import eccentricities, exact_mixing, is_aperiodic, is_connected, transition_matrix
from .errors import BipswitchError, BufferInfeasible
from .flow import (
    _flow_pairs,
    agrees_outside,
    build_buffer,
    buffer_width,
    enumerate_flows,
    excess_profile,
    flow_representation,
    flow_to_realization,
    g_sequence,
    h0_sequence,
    halfgraph,
    hk_sequence,
)
from .paths import measure_load
from .transfer import count_hk_matrix, is_primitive, perron_root, stability_probe, type_matrix
from .tyshkevich import (
    all_s2_graphic,
    decompose,
    is_covered_by_alternating_cycles,
    is_decomposable,
    psi_inverse,
)

ORACLE = 64


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} [{self.seconds:.1f}s]"


class _Timer:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t


def _result(name: str, passed: bool, detail: str, timer: _Timer) -> CheckResult:
    return CheckResult(name, bool(passed), detail, timer.seconds)


# --------------------------------------------------------------- the suites


def suite_uniqueness() -> list[CheckResult]:
    with _Timer() as t:
        sizes = [len(enumerate_realizations(h0_sequence(n), ORACLE)) for n in range(1, 9)]
        no_moves = all(not valid_switches(halfgraph(n)) for n in range(1, 9))
    return [_result("h0(n) has one realization and no switch, n=1..8", sizes == [1] * 8 and no_moves,
                    f"counts={sizes}, switch-free={no_moves}", t)]


def suite_hypercube() -> list[CheckResult]:
    with _Timer() as t:
        sizes = [len(enumerate_realizations(g_sequence(n), ORACLE)) for n in range(1, 5)]
        cm = transition_matrix(g_sequence(3), ORACLE)
        degs = sorted(len(valid_switches(G)) for G in cm.states)
        # the 3-cube: 8 vertices, 3-regular, every eccentricity 3
        ecc = eccentricities(cm)
    ok = sizes == [2 ** n for n in range(1, 5)] and degs == [3] * 8 and max(ecc) == 3 and min(ecc) == 3
    return [_result("|G(g(n))| = 2^n and Markov graph of g(3) is the 3-cube", ok,
                    f"counts={sizes}, degrees={degs}, eccentricities={ecc}", t)]


def suite_transfer() -> list[CheckResult]:
    out = []
    with _Timer() as t:
        got1 = [count_hk_matrix(1, n) for n in range(2, 9)]
        ora1 = [len(enumerate_realizations(hk_sequence(n, 1), ORACLE)) for n in range(2, 9)]
    out.append(_result("count_hk_matrix(1,n) == oracle, n=2..8", got1 == ora1, f"matrix={got1} oracle={ora1}", t))
    with _Timer() as t:
        got2 = [count_hk_matrix(2, n) for n in range(3, 9)]
        ora2 = [len(enumerate_realizations(hk_sequence(n, 2), ORACLE)) for n in range(3, 9)]
    out.append(_result("count_hk_matrix(2,n) == oracle, n=3..8", got2 == ora2, f"matrix={got2} oracle={ora2}", t))
    return out


def suite_perron() -> list[CheckResult]:
    out = []
    with _Timer() as t:
        r1 = perron_root(type_matrix(1))
        err = abs(r1 - (3 + math.sqrt(5)) / 2)
    out.append(_result("perron_root(P1) == (3+sqrt5)/2 within 1e-9", err <= 1e-9, f"r1={r1!r}, error={err:.2e}", t))
    with _Timer() as t:
        r2 = perron_root(type_matrix(2))
    out.append(_result("perron_root(P2) > perron_root(P1)", r2 > r1, f"r2={r2:.12g}", t))
    with _Timer() as t:
        prim = [is_primitive(type_matrix(k)) for k in (1, 2, 3)]
    out.append(_result("P_k^(2k) entrywise positive, k=1..3", all(prim), f"{prim}", t))
    return out


def suite_stability() -> list[CheckResult]:
    out = []
    with _Timer() as t:
        rep = stability_probe(2, range(14, 26))
    for k in (0, 1):
        rows = [r for r in rep.rows if r.k == k and 15 <= r.n <= 25]
        rel = [abs(r.growth / r.target - 1) for r in rows]
        out.append(_result(
            f"growth of |G(h{k + 1}(n))|/|G(h{k}(n))| within 5% of r{k + 1}/r{k}, n=15..25",
            len(rows) == 11 and max(rel) <= 0.05,
            f"target={rows[0].target:.9g}, max relative deviation={max(rel):.2e}", t))
    return out


def sphere(n: int, radius: int) -> list[DegreeSequence]:
    """Sequences ``d`` on ``n + n`` vertices with ``||d - h0(n)||_1 == radius``,
    equal side sums and entries in ``0..n``."""
    h = list(h0_sequence(n).degA) + list(h0_sequence(n).degB)
    out = []

    def rec(t: int, left: int, vec: list[int]) -> None:
        if t == 2 * n:
            if left == 0 and sum(vec[:n]) == sum(vec[n:]):
                out.append(DegreeSequence(vec[:n], vec[n:]))
            return
        for delta in range(-left, left + 1):
            x = h[t] + delta
            if 0 <= x <= n:
                vec.append(x)
                rec(t + 1, left - abs(delta), vec)
                vec.pop()

    rec(0, radius, [])
    return out


def suite_bijection() -> list[CheckResult]:
    checked = graphic = 0
    failures = []
    with _Timer() as t:
        for n in range(1, 7):
            for radius in (2, 4):
                for d in sphere(n, radius):
                    checked += 1
                    ex = excess_profile(d)
                    reals = enumerate_realizations(d, ORACLE)
                    flows = enumerate_flows(n, ex)
                    graphic += bool(reals)
                    images = set()
                    for G in reals:
                        W = flow_representation(G)
                        W.check()
                        if W.excess != ex or flow_to_realization(W) != G:
                            failures.append(str(d))
                            break
                        images.add(W.arcs)
                    if len(images) != len(reals) or images != set(flows):
                        failures.append(str(d))
    return [_result("flow representation is a bijection on S2 and S4 of h0(n), n<=6", not failures,
                    f"{checked} sequences ({graphic} graphic), failures={failures[:3]}", t)]


def _class_key_left(G: Realization, i: int) -> frozenset:
    return frozenset(pq for pq in _flow_pairs(G.rows, G.nA) if min(pq) <= i)


def _class_key_right(G: Realization, hi: int) -> frozenset:
    return frozenset(pq for pq in _flow_pairs(G.rows, G.nA) if max(pq) > hi)


def buffer_sweep(d: DegreeSequence, z: int) -> tuple[int, int, list[str]]:
    """Check build_buffer on every ``(X, Y, i)`` triple for ``d``.

    The buffer depends on ``Y`` only through its flow touching ``U_i`` and on
    ``X`` only through its flow touching the part right of ``i + z``; both
    postconditions likewise only read those parts.  Triples are therefore
    grouped into classes by these two keys and one representative per class
    is built and checked; the returned count is the number of triples covered.
    """
    reals = enumerate_realizations(d, ORACLE)
    n = d.nA
    triples = classes = 0
    bad: list[str] = []
    for i in range(0, n - z + 1):
        lefts: dict[frozenset, tuple[Realization, int]] = {}
        rights: dict[frozenset, tuple[Realization, int]] = {}
        for G in reals:
            kl, kr = _class_key_left(G, i), _class_key_right(G, i + z)
            rep, c = lefts.get(kl, (G, 0))
            lefts[kl] = (rep, c + 1)
            rep, c = rights.get(kr, (G, 0))
            rights[kr] = (rep, c + 1)
        for Y, cy in lefts.values():
            for X, cx in rights.values():
                classes += 1
                triples += cx * cy
                try:
                    T = build_buffer(X, Y, i, z)
                except BufferInfeasible as e:
                    bad.append(f"{d} i={i}: {e}")
                    continue
                if T.degree_sequence() != d or not agrees_outside(T, Y, X, i, i + z):
                    bad.append(f"{d} i={i}: postcondition")
    return triples, classes, bad


def suite_buffer() -> list[CheckResult]:
    out = []
    plans = [
        (1, 1, [hk_sequence(n, 1) for n in range(2, 8)]),
        (1, buffer_width(1), [hk_sequence(n, 1) for n in range(buffer_width(1), 8)]),
        (2, buffer_width(2), [hk_sequence(n, 2) for n in range(buffer_width(2), 8)]),
        # z=7 leaves only i=0 at n=7, so also sweep a window narrower than the graph
        (2, 3, [hk_sequence(n, 2) for n in range(3, 8)]),
    ]
    for k, z, seqs in plans:
        with _Timer() as t:
            triples = classes = 0
            bad: list[str] = []
            for d in seqs:
                a, b, c = buffer_sweep(d, z)
                triples, classes, bad = triples + a, classes + b, bad + c
        out.append(_result(f"build_buffer k={k}, z={z}: all (X,Y,i) for h{k}(n), n<=7", not bad and triples > 0,
                           f"{triples} triples in {classes} classes, failures={bad[:3]}", t))
    return out


@lru_cache(maxsize=None)
def _load(n: int):
    return measure_load(hk_sequence(n, 1), 1, ORACLE, check=True)


def suite_reconstruct() -> list[CheckResult]:
    out = []
    bound = 0.5 * (5 * 1 + 2) ** 2
    for n in (5, 6, 7):
        with _Timer() as t:
            try:
                rep = _load(n)
                ok = rep.max_segment <= bound
                detail = (f"|G|={rep.state_count}, {rep.state_count * (rep.state_count - 1)} paths, "
                          f"longest={rep.ell}, max segment={rep.max_segment} (bound {bound}), "
                          f"{rep.reconstruct_checked} reconstructions")
            except BipswitchError as e:
                ok, detail = False, str(e)
        out.append(_result(f"canonical paths for h1({n}): valid, duplicate-free, reconstructible", ok, detail, t))
    return out


def suite_encoding() -> list[CheckResult]:
    with _Timer() as t:
        reps = {n: _load(n) for n in (5, 6, 7)}
        cs = {n: r.encoding_constant for n, r in reps.items()}
        flat = cs[6] <= cs[5] and cs[7] <= cs[6]
    detail = ", ".join(f"n={n}: {reps[n].distinct_encodings} encodings, c={c:.3f}" for n, c in cs.items())
    return [_result("distinct encodings <= c*|G|*n with c not increasing over n=5..7", flat, detail, t)]


def chain_sequences() -> list[DegreeSequence]:
    return [
        hk_sequence(4, 1), hk_sequence(5, 1), hk_sequence(5, 2), hk_sequence(6, 1),
        g_sequence(2), g_sequence(3),
        DegreeSequence([2, 2, 2], [2, 2, 2]),
        DegreeSequence([2, 2, 1, 1], [2, 2, 1, 1]),
        DegreeSequence([3, 2, 2, 1], [2, 2, 2, 2]),
        DegreeSequence([2, 2, 2, 2], [2, 2, 2, 2]),
    ]


def suite_chain() -> list[CheckResult]:
    out = []
    with _Timer() as t:
        notes = []
        ok = True
        for d in chain_sequences():
            cm = transition_matrix(d, ORACLE)
            P = cm.P
            good = (
                np.allclose(P, P.T, atol=1e-15)
                and np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
                and np.allclose(P.sum(axis=0), 1.0, atol=1e-12)
                and is_connected(cm)
                and is_aperiodic(cm)
            )
            ok &= bool(good)
            notes.append(f"{d}:{len(cm)}{'' if good else '!'}")
    out.append(_result("transition matrices symmetric, doubly stochastic, connected, aperiodic (10 sequences)",
                       ok, "; ".join(notes), t))
    with _Timer() as t:
        rep = _load(5)
        mix = exact_mixing(hk_sequence(5, 1), [0.25], ORACLE)
        tau = mix.tau[0.25]
        bound = rep.sinclair(0.25)
    out.append(_result("tau(1/4) <= Sinclair bound rho*l*(log|G|+log 4) on h1(5)", tau <= bound,
                       f"tau={tau}, rho={rep.rho:.6g}, l={rep.ell}, bound={bound:.6g}", t))
    return out


def small_sequences(max_total: int = 8) -> list[DegreeSequence]:
    """Every graphic sequence (sorted, both sides non-empty) with ``|A| + |B| <= max_total``."""
    out = []
    for N in range(2, max_total + 1):
        for nA in range(1, N):
            nB = N - nA
            for a in combinations_with_replacement(range(nB + 1), nA):
                for b in combinations_with_replacement(range(nA + 1), nB):
                    d = DegreeSequence(a[::-1], b[::-1])
                    if sum(a) == sum(b) and is_bigraphic(d):
                        out.append(d)
    return out


def suite_decomposition() -> list[CheckResult]:
    out = []
    with _Timer() as t:
        comps = [len(decompose(h0_sequence(n)).components) for n in range(1, 11)]
    out.append(_result("decompose(h0(n)) has 2n components, n<=10", comps == [2 * n for n in range(1, 11)],
                       f"{comps}", t))
    with _Timer() as t:
        dec = [(n, k) for n in range(2, 11) for k in range(1, n) if is_decomposable(hk_sequence(n, k)) is not None]
    out.append(_result("h_k(n) indecomposable for 0<k<n<=10", not dec, f"decomposable: {dec}", t))
    with _Timer() as t:
        seqs = small_sequences(8)
        bad = []
        for d in seqs:
            i1 = is_decomposable(d) is None
            i2 = all(is_covered_by_alternating_cycles(G) for G in enumerate_realizations(d, ORACLE))
            i3 = all_s2_graphic(d)
            if not i1 == i2 == i3:
                bad.append(str(d))
    out.append(_result("indecomposable <=> covered by alternating cycles <=> S2 graphic, |A|+|B|<=8", not bad,
                       f"{len(seqs)} sequences, mismatches={bad[:3]}", t))
    return out


def suite_psi() -> list[CheckResult]:
    with _Timer() as t:
        reals = enumerate_realizations(hk_sequence(4, 1), ORACLE)
        images = [psi_inverse(G) for G in reals]
        bad = 0
        pairs = 0
        for (x, X), (y, Y) in product(enumerate(reals), repeat=2):
            if x >= y:
                continue
            pairs += 1
            bip = len(X.symmetric_difference(Y)) == 4
            simple = images[x].is_switch_of(images[y])
            bad += bip != simple
    return [_result("psi_inverse preserves switch adjacency on h1(4)", bad == 0,
                    f"{pairs} pairs, mismatches={bad}", t)]


SUITES = {
    "uniqueness": suite_uniqueness,
    "hypercube": suite_hypercube,
    "transfer": suite_transfer,
    "perron": suite_perron,
    "stability": suite_stability,
    "bijection": suite_bijection,
    "buffer": suite_buffer,
    "reconstruct": suite_reconstruct,
    "encoding": suite_encoding,
    "chain": suite_chain,
    "decomposition": suite_decomposition,
    "psi": suite_psi,
}


def run_suite(name: str) -> list[CheckResult]:
    return SUITES[name]()
