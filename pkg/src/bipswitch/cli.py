"""Command-line entry point: ``bipswitch <verb> [options]``.

Exit status 0 on success, 1 when a library precondition fails (the message
names it), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import checks
from .bigraph import DEFAULT_ORACLE_LIMIT, DegreeSequence, Realization, enumerate_realizations, havel_hakimi
from .chain import ChainConfig, exact_mixing, sample, sample_many
from .errors import BipswitchError, DomainError
from .flow import build_buffer, flow_representation, flow_to_realization, g_sequence, h0_sequence, hk_sequence
from .paths import canonical_path, measure_load
from .transfer import count_hk_matrix, stability_probe
from .tyshkevich import count_via_components, decompose


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=S, help="64-bit RNG seed")
    p.add_argument("--json", action="store_true", default=S, help="machine-readable output")
    p.add_argument("--out", default=S, help="write output to this file")
    p.add_argument("--oracle-limit", type=int, default=S, help="max adjacency cells for brute force")
    return p


def _seq_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("degree sequence (one of)")
    g.add_argument("--seq", help='JSON {"degA": [...], "degB": [...]} or @file')
    g.add_argument("--hk", type=int, metavar="K", help="h_K(n); needs --n")
    g.add_argument("--g", type=int, metavar="N", help="the doubled half-graph sequence g(N)")
    g.add_argument("--h0", type=int, metavar="N", help="the half-graph sequence h_0(N)")
    p.add_argument("--n", type=int)


def _read_arg(text: str) -> str:
    return Path(text[1:]).read_text() if text.startswith("@") else text


def _sequence(a) -> DegreeSequence:
    given = [x is not None for x in (a.seq, a.hk, a.g, a.h0)]
    if sum(given) != 1:
        raise DomainError("give exactly one of --seq, --hk, --g, --h0")
    if a.seq is not None:
        return DegreeSequence.from_json(_read_arg(a.seq))
    if a.hk is not None:
        if a.n is None:
            raise DomainError("--hk needs --n")
        return hk_sequence(a.n, a.hk)
    if a.g is not None:
        return g_sequence(a.g)
    return h0_sequence(a.h0)


def _graph(path: str, d: DegreeSequence | None = None) -> Realization:
    G = Realization.from_edgelist(_read_arg("@" + path), d.nA if d else None, d.nB if d else None)
    if d is not None and G.degree_sequence() != d:
        raise DomainError(f"{path} does not realize {d}")
    return G


def _pair(a, d: DegreeSequence) -> tuple[Realization, Realization]:
    """X and Y from --x/--y, or two chain samples seeded from --seed."""
    if a.x and a.y:
        return _graph(a.x, d), _graph(a.y, d)
    X, Y = sample_many(d, 2, a.steps or 10_000, a.seed)
    return X, Y


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = argparse.ArgumentParser(prog="bipswitch", parents=[common],
                                description="Switch Markov chain workbench for bipartite degree sequences.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("sample", parents=[common], help="run the switch chain and print the final state")
    _seq_options(s)
    s.add_argument("--steps", type=int, default=10_000)

    s = sub.add_parser("enumerate", parents=[common], help="list every realization (brute force)")
    _seq_options(s)
    s.add_argument("--count-only", action="store_true")

    s = sub.add_parser("count", parents=[common], help="count realizations")
    _seq_options(s)
    s.add_argument("--method", choices=["auto", "matrix", "oracle", "components"], default="auto")

    s = sub.add_parser("decompose", parents=[common], help="indecomposable factors of a sequence")
    _seq_options(s)

    s = sub.add_parser("flow", parents=[common], help="flow representation round trip")
    _seq_options(s)
    s.add_argument("--graph", help="edge-list file of the realization (default: greedy realization)")

    s = sub.add_parser("buffer", parents=[common], help="build a buffer realization")
    _seq_options(s)
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--z", type=int, required=True)
    s.add_argument("--steps", type=int, default=0)

    s = sub.add_parser("path", parents=[common], help="canonical path, or the load of all of them")
    _seq_options(s)
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--steps", type=int, default=0)
    s.add_argument("--load", action="store_true", help="measure the load over all ordered pairs")

    s = sub.add_parser("mix", parents=[common], help="exact mixing times from the transition matrix")
    _seq_options(s)
    s.add_argument("--eps", type=float, nargs="+", default=[0.25])

    s = sub.add_parser("stability", parents=[common], help="ratio growth between consecutive h_k counts")
    s.add_argument("--kmax", type=int, default=2)
    s.add_argument("--nmin", type=int, default=2)
    s.add_argument("--nmax", type=int, default=20)

    s = sub.add_parser("check", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=sorted(checks.SUITES) + ["all"])
    return p


def _emit(a, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if getattr(a, "out", None):
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)


def _run(a) -> int:
    limit = a.oracle_limit
    as_json = a.json
    v = a.verb
    if v == "sample":
        d = _sequence(a)
        G = sample(d, ChainConfig(seed=a.seed, steps=a.steps))
        _emit(a, json.dumps({"edges": G.edges()}) if as_json else G.to_edgelist())
    elif v == "enumerate":
        reals = enumerate_realizations(_sequence(a), limit)
        if a.count_only:
            _emit(a, json.dumps({"count": len(reals)}) if as_json else str(len(reals)))
        elif as_json:
            _emit(a, json.dumps([G.edges() for G in reals]))
        else:
            _emit(a, "\n".join(G.to_edgelist() for G in reals) if reals else "")
    elif v == "count":
        method = a.method
        if method == "auto":
            method = "matrix" if a.hk is not None and a.hk > 0 else "oracle"
        if method == "matrix":
            if a.hk is None or a.n is None:
                raise DomainError("the matrix method counts h_k(n); give --hk and --n")
            c = count_hk_matrix(a.hk, a.n)
        elif method == "components":
            c = count_via_components(_sequence(a), limit)
        else:
            c = len(enumerate_realizations(_sequence(a), limit))
        _emit(a, json.dumps({"count": c}) if as_json else str(c))
    elif v == "decompose":
        rep = decompose(_sequence(a))
        if as_json:
            _emit(a, rep.to_json())
        else:
            lines = [f"{len(rep.components)} components"]
            lines += [str(c) for c in rep.components]
            lines += [f"split {p} {q}" for p, q in rep.split_points]
            _emit(a, "\n".join(lines))
    elif v == "flow":
        d = _sequence(a)
        G = _graph(a.graph, d) if a.graph else havel_hakimi(d)
        W = flow_representation(G)
        back = flow_to_realization(W)
        if back != G:
            raise BipswitchError("flow round trip changed the realization")
        if as_json:
            _emit(a, json.dumps({**W.to_dict(), "k": W.k, "roundTrip": True}))
        else:
            lines = [f"k {W.k}"]
            lines += [f"excess {key} {x}" for key, x in W.excess.to_dict().items()]
            lines += [f"arc {u[0]}{u[1]} {w[0]}{w[1]}" for u, w in W.directed_arcs()]
            lines.append("round-trip ok")
            _emit(a, "\n".join(lines))
    elif v == "buffer":
        d = _sequence(a)
        X, Y = _pair(a, d)
        T = build_buffer(X, Y, a.i, a.z)
        _emit(a, json.dumps({"x": X.edges(), "y": Y.edges(), "buffer": T.edges()}) if as_json else T.to_edgelist())
    elif v == "path":
        d = _sequence(a)
        if a.load:
            rep = measure_load(d, None, limit)
            _emit(a, json.dumps(rep.to_dict()) if as_json else rep.to_csv())
        else:
            X, Y = _pair(a, d)
            path = canonical_path(X, Y)
            if as_json:
                _emit(a, json.dumps({"x": X.edges(), "y": Y.edges(), **path.to_dict()}))
            else:
                lines = [f"length {len(path.moves)}"]
                lines += [" ".join(map(str, m.to_list())) for m in path.moves]
                _emit(a, "\n".join(lines))
    elif v == "mix":
        rep = exact_mixing(_sequence(a), a.eps, limit)
        if as_json:
            _emit(a, json.dumps(rep.to_dict()))
        else:
            head = [f"states {rep.state_count}", f"diameter {rep.diameter}"]
            head += [f"tau {e:g} {t}" for e, t in rep.tau.items()]
            _emit(a, "\n".join(head) + "\n\n" + rep.to_csv())
    elif v == "stability":
        rep = stability_probe(a.kmax, range(a.nmin, a.nmax + 1))
        if as_json:
            _emit(a, json.dumps([asdict(r) for r in rep.rows]))
        else:
            _emit(a, rep.to_csv())
    elif v == "check":
        names = sorted(checks.SUITES) if a.suite == "all" else [a.suite]
        results = [r for name in names for r in checks.run_suite(name)]
        if as_json:
            _emit(a, json.dumps([asdict(r) for r in results]))
        else:
            _emit(a, "\n".join(r.line() for r in results))
        failed = [r for r in results if not r.passed]
        if failed:
            print(f"first failure: {failed[0].name}", file=sys.stderr)
            return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    for name, default in (("seed", 0), ("json", False), ("out", None), ("oracle_limit", DEFAULT_ORACLE_LIMIT)):
        if not hasattr(a, name):
            setattr(a, name, default)
    try:
        return _run(a)
    except BipswitchError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
