"""Command-line interface.

Exit codes: 0 for YES or a printed value, 1 for NO, 2 for any error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .certify import (
    ExactOracle,
    NonNegWitness,
    basis_witness_peel,
    check_injective,
    count_via_gtnz,
    decide_at_least_k,
    injective_certificate,
    verify_nonneg_witness,
)
from .contract import (
    DEFAULT_ENUMERATION_CAP,
    contract_closed,
    contract_open,
    evaluate,
    evaluate_vectors,
)
from .errors import ParseError, TNZError
from .hamiltonian import DEFAULT_MAX_QUDITS, solve_stoquastic_sat
from .reduce import (
    GtnzInstance,
    build_bell_mps,
    compile_clh,
    compile_edge_coloring,
    compile_sharp2sat,
)

YES, NO, ERROR = 0, 1, 2


def _read(path):
    with open(path) as fh:
        return fh.read()


def _emit(doc):
    print(json.dumps(doc))


def cmd_contract(args):
    T = io.read_network(args.file)
    print(io.format_scalar(contract_closed(T)))
    return YES


def cmd_tnz(args):
    T = io.read_network(args.file)
    alpha = io.parse_scalar(args.alpha)
    beta = io.parse_scalar(args.beta)
    instance = GtnzInstance(T, alpha, beta)
    if args.witness:
        w = io.read_witness(args.witness)
        if "vectors" in w:
            ok = bool(evaluate_vectors(T, w["vectors"]))
        elif "labeling" in w:
            ok = verify_nonneg_witness(T, NonNegWitness(w.get("x", {}), w["labeling"]))
        elif "x" in w:
            ok = evaluate(T, w["x"]).abs2() > instance.beta.abs2()
        else:
            raise ParseError("witness file has none of 'x', 'labeling', 'vectors'")
        print("YES" if ok else "NO")
        return YES if ok else NO
    if alpha == 1 and beta == 0:
        x = basis_witness_peel(T, cap=args.cap)
    else:
        x = None
        if ExactOracle(args.cap)(instance):
            beta2 = instance.beta.abs2()
            hits = sorted(k for k, v in contract_open(T).items() if v.abs2() > beta2)
            x = dict(zip(T.physical_edges, hits[0]))
    if x is None:
        print("NO")
        return NO
    print("YES")
    _emit(io.witness_to_dict(x=x))
    return YES


def cmd_reduce(args):
    kind = args.kind
    if kind == "bellmps":
        if args.n is None:
            raise ParseError("bellmps needs --n")
        T = build_bell_mps(args.n)
    else:
        if not args.input:
            raise ParseError(f"{kind} needs an input file")
        if kind == "sharp2sat":
            T = compile_sharp2sat(io.parse_dimacs(_read(args.input)))
        elif kind == "ecol":
            if args.colors is None:
                raise ParseError("ecol needs --colors")
            T = compile_edge_coloring(io.parse_edge_list(_read(args.input)), args.colors)
        else:
            H, guesses = io.read_hamiltonian(args.input)
            if args.guesses:
                guesses = io.read_guesses(args.guesses)
            if guesses is None:
                raise ParseError("clh needs guesses (in the Hamiltonian file or --guesses)")
            if args.x is None:
                raise ParseError("clh needs --x")
            T = compile_clh(H, guesses, _basis_string(args.x, H))
    sys.stdout.write(io.dumps_network(T))
    return YES


def _basis_string(text, H):
    try:
        x = [int(c) for c in text.strip()]
    except ValueError:
        raise ParseError(f"--x must be a string of digits, got {text!r}") from None
    if len(x) != H.n or any(v >= H.D for v in x):
        raise ParseError(f"--x must have {H.n} digits below {H.D}")
    return x


def cmd_count(args):
    phi = io.parse_dimacs(_read(args.file))
    oracle = ExactOracle(args.cap)
    m = count_via_gtnz(phi, oracle)
    # the shifted-network decision must agree at the boundary
    top = 2**phi.num_vars
    if m >= 1 and not decide_at_least_k(phi, m, oracle, loop_cap=0):
        raise TNZError(f"shifted-network check disagrees: count {m} not confirmed")
    if m < top and decide_at_least_k(phi, m + 1, oracle, loop_cap=0):
        raise TNZError(f"shifted-network check disagrees at {m + 1}")
    print(m)
    return YES


def _partition(text):
    blocks = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            raise ParseError(f"empty block in partition {text!r}")
        try:
            blocks.append([int(v) for v in part.split(",")])
        except ValueError:
            raise ParseError(f"bad partition {text!r}") from None
    return blocks


def cmd_injective(args):
    T = io.read_network(args.file)
    blocks = _partition(args.partition)
    if not check_injective(T, blocks, cap=args.cap):
        print("NO")
        return NO
    print("YES")
    if args.certify:
        psi = injective_certificate(T, blocks, cap=args.cap)
        _emit(io.witness_to_dict(vectors=psi))
        print(f"evaluation: {io.format_scalar(evaluate_vectors(T, psi))}")
    return YES


def cmd_stoq(args):
    H, guesses = io.read_hamiltonian(args.file)
    if args.guesses:
        guesses = io.read_guesses(args.guesses)
    x = _basis_string(args.x, H) if args.x is not None else None
    if H.n > args.max_qudits:
        raise TNZError(f"{H.n} qudits exceed --max-qudits {args.max_qudits}")
    result = solve_stoquastic_sat(H, guesses, x, budget=args.budget)
    if not result.satisfiable:
        print("NO")
        return NO
    print("YES")
    print("x = " + "".join(str(v) for v in result.x))
    w = result.witness
    _emit(io.witness_to_dict(x=w.x, labeling=w.labeling))
    return YES


def build_parser():
    p = argparse.ArgumentParser(prog="tnz", description="Exact tensor-network toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("contract", help="contract a closed network exactly")
    c.add_argument("file")
    c.set_defaults(func=cmd_contract)

    c = sub.add_parser("tnz", help="decide whether a network is non-zero")
    c.add_argument("file")
    c.add_argument("--alpha", default="1")
    c.add_argument("--beta", default="0")
    c.add_argument("--witness", help="witness file to verify instead of searching")
    c.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    c.set_defaults(func=cmd_tnz)

    c = sub.add_parser("reduce", help="compile a problem into a network file")
    c.add_argument("kind", choices=["sharp2sat", "ecol", "clh", "bellmps"])
    c.add_argument("input", nargs="?", help="DIMACS, edge list or Hamiltonian JSON")
    c.add_argument("--colors", type=int, help="number of colors (ecol)")
    c.add_argument("--guesses", help="guesses JSON overriding the Hamiltonian file (clh)")
    c.add_argument("--x", help="basis string of digits 0..D-1 (clh)")
    c.add_argument("--n", type=int, help="chain length (bellmps)")
    c.set_defaults(func=cmd_reduce)

    c = sub.add_parser("count", help="count models of a 2-CNF through gTNZ queries")
    c.add_argument("file")
    c.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("injective", help="check an injective partition")
    c.add_argument("file")
    c.add_argument("--partition", required=True, help='node ids, e.g. "1,2;3,4"')
    c.add_argument("--certify", action="store_true")
    c.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    c.set_defaults(func=cmd_injective)

    c = sub.add_parser("stoq", help="solve commuting stoquastic k-SAT")
    c.add_argument("file")
    c.add_argument("--guesses")
    c.add_argument("--x")
    c.add_argument("--budget", type=int, default=4096)
    c.add_argument("--max-qudits", type=int, default=DEFAULT_MAX_QUDITS)
    c.set_defaults(func=cmd_stoq)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else 0
    try:
        return args.func(args)
    except TNZError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR
    except (OSError, ValueError, RecursionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
