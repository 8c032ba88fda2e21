"""``exdec`` command line: decompose, cut-matching, verify.

Exit codes: 0 success, 1 validation failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .cutmatch import potential_trace, run_cut_matching
from .decomp import DecompositionResult, load_result, strong_decomposition, weak_decomposition
from .errors import ExdecError, InputError
from .graph import parse_edge_list, regularized_weighting
from .oracle import validate_decomposition

EXIT_OK, EXIT_INVALID, EXIT_INPUT = 0, 1, 2


def _phi(text: str) -> Fraction:
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError("phi must lie strictly between 0 and 1")
    return x


def _tau(text: str) -> Fraction:
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if x < 10 ** 4:
        raise argparse.ArgumentTypeError("tau must be at least 10000")
    return x


def _seed(text: str) -> int:
    try:
        x = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not -(2 ** 63) <= x < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return x % (2 ** 64)


def _positive(text: str) -> Fraction:
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _num(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exdec", description="Directed expander decompositions with certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("graph", help="edge list: 'tail head capacity' per line, optional 'p n m' header")
        sp.add_argument("--phi", type=_phi, default=Fraction(1, 100))
        sp.add_argument("--tau", type=_tau, default=Fraction(10 ** 4))
        sp.add_argument("--seed", type=_seed, default=0)
        sp.add_argument("--c-T", dest="c_T", type=_positive, default=Fraction(10),
                        help="round constant: T = ceil(c_T·log2 n·log2 nW)")
        sp.add_argument("--matching", choices=["exact", "push-relabel"], default="exact")
        sp.add_argument("--output", "-o", help="write here instead of stdout")
        sp.add_argument("--json", action="store_true", help="JSON instead of the text serialization")

    d = sub.add_parser("decompose", help="weak or strong expander decomposition")
    common(d)
    d.add_argument("--mode", choices=["weak", "strong"], default="strong")
    d.add_argument("--c0", type=_positive, default=Fraction(4096))
    d.add_argument("--verify", action="store_true", help="validate the result; exit 1 on failure")
    d.add_argument("--inter-constant", type=_positive, default=None,
                   help="with --verify, bound inter-component capacity by c·φ·deg(V)·log2(nW)")

    c = sub.add_parser("cut-matching", help="run one cut-matching game")
    common(c)
    c.add_argument("--dump-potentials", metavar="CSV", help="write t, psi, psi_rev per round")

    v = sub.add_parser("verify", help="validate a saved result against its graph")
    v.add_argument("result")
    v.add_argument("graph")
    v.add_argument("--inter-constant", type=_positive, default=None)
    return p


def _threads():
    raw = os.environ.get("EXDEC_THREADS")
    if raw is None:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise InputError(f"EXDEC_THREADS must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise InputError("EXDEC_THREADS must be a positive integer")
    return k


def _read_graph(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_edge_list(text)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _inter_bound(G, phi, c):
    if c is None:
        return {}
    import math
    return {"inter_capacity": Fraction(c) * phi * 2 * G.total_capacity()
            * Fraction(math.log2(max(2, G.n * G.W))).limit_denominator(10 ** 9)}


def _report(rep, stream):
    for line in rep.lines():
        print(line, file=stream)


def cmd_decompose(args) -> int:
    G = _read_graph(args.graph)
    c_T = _num(args.c_T)
    if args.mode == "strong":
        res = strong_decomposition(G, args.phi, seed=args.seed, tau=args.tau, matching=args.matching,
                                   c_T=c_T, c0=_num(args.c0))
    else:
        res = weak_decomposition(G, None, args.phi, seed=args.seed, tau=args.tau, matching=args.matching,
                                 c_T=c_T)
    _emit(res.to_json() if args.json else res.to_text(), args.output)
    if args.verify:
        rep = validate_decomposition(G, res, bounds=_inter_bound(G, args.phi, args.inter_constant))
        _report(rep, sys.stderr)
        return EXIT_OK if rep.ok else EXIT_INVALID
    return EXIT_OK


def cut_matching_document(G, out, args) -> dict:
    trace = potential_trace(out)
    return {
        "format": "exdec-cut-matching/1",
        "outcome": out.tag,
        "n": G.n,
        "m": G.m,
        "phi": str(args.phi),
        "tau": str(args.tau),
        "seed": args.seed,
        "matching": args.matching,
        "T": out.T,
        "rounds": out.rounds_run,
        "congestion": str(out.congestion),
        "A_star": sorted(out.A_star) if out.A_star is not None else None,
        "certificates": [
            {"kind": c.kind, "S": sorted(c.S), "host": sorted(c.host), "value": str(c.value),
             "bound": str(c.sparsity_bound)} for c in out.cuts],
        "potentials": [[t, repr(a), repr(b)] for t, a, b in trace],
    }


def _cm_text(doc: dict) -> str:
    lines = [f"format {doc['format']}", f"outcome {doc['outcome']}"]
    for k in ("n", "m", "phi", "tau", "seed", "matching", "T", "rounds", "congestion"):
        lines.append(f"{k} {doc[k]}")
    if doc["A_star"] is not None:
        lines.append("A_star : " + " ".join(map(str, doc["A_star"])))
    lines.append(f"certificates {len(doc['certificates'])}")
    for c in doc["certificates"]:
        lines.append(f"certificate {c['kind']} value={c['value']} bound={c['bound']} S : "
                     + " ".join(map(str, c["S"])) + " | host : " + " ".join(map(str, c["host"])))
    for t, a, b in doc["potentials"]:
        lines.append(f"psi {t} {a} {b}")
    return "\n".join(lines) + "\n"


def cmd_cut_matching(args) -> int:
    G = _read_graph(args.graph)
    if G.m == 0:
        raise InputError("cut-matching needs at least one edge")
    d = regularized_weighting(G)
    out = run_cut_matching(G, d, args.phi, tau=args.tau, seed=args.seed, mode=args.matching,
                           c_T=_num(args.c_T))
    doc = cut_matching_document(G, out, args)
    _emit(json.dumps(doc, indent=1) + "\n" if args.json else _cm_text(doc), args.output)
    if args.dump_potentials:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "psi", "psi_rev"])
        w.writerows(doc["potentials"])
        with open(args.dump_potentials, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    G = _read_graph(args.graph)
    try:
        with open(args.result, encoding="utf-8") as fh:
            res: DecompositionResult = load_result(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {args.result}: {exc.strerror}") from None
    if (res.n, res.m) != (G.n, G.m):
        raise InputError(f"result is for a graph with n={res.n}, m={res.m}; got n={G.n}, m={G.m}")
    rep = validate_decomposition(G, res, bounds=_inter_bound(G, res.phi, args.inter_constant))
    _report(rep, sys.stdout)
    return EXIT_OK if rep.ok else EXIT_INVALID


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        _threads()
        if args.command == "decompose":
            return cmd_decompose(args)
        if args.command == "cut-matching":
            return cmd_cut_matching(args)
        return cmd_verify(args)
    except InputError as exc:
        print(f"exdec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExdecError as exc:
        print(f"exdec: internal error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
