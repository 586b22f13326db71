"""Command-line front end: ``ftqec verify | list-codes | gen-gadget | oracle-check``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import __version__
from .codes import builtin, code_names, is_large, load_code
from .cqprog.parser import ParseError, parse, pretty
from .gadgets import GadgetSpec, build_gadget, builtin_gadget, builtin_gadget_names, spec_from_program
from .smt import ENCODINGS, find_solver
from .verifier import (
    DEFAULT_ENCODING,
    FAULT_TOLERANT,
    INCONCLUSIVE,
    NOT_FAULT_TOLERANT,
    VerificationJob,
    oracle_verdict,
    verdict_json,
    verify,
)

EXIT_CODES = {FAULT_TOLERANT: 0, NOT_FAULT_TOLERANT: 1, INCONCLUSIVE: 2}
EXIT_ERROR = 2


class UsageError(Exception):
    pass


def _gate_large(name: Optional[str], allow: bool) -> None:
    if name and not allow and name in code_names() and is_large(name):
        raise UsageError(f"code {name} is large; pass --large to use it")


def _builtin_code_of(name: str) -> Optional[str]:
    for c in sorted(code_names(), key=len, reverse=True):
        if name.startswith(c + "_"):
            return c
    return None


def _load_gadget(args) -> GadgetSpec:
    code = load_code(args.code) if args.code else None
    if args.builtin:
        _gate_large(_builtin_code_of(args.builtin), args.large)
        return builtin_gadget(args.builtin)
    if not args.gadget:
        raise UsageError("give a .cqp file or --builtin NAME")
    with open(args.gadget) as fh:
        prog = parse(fh.read())
    _gate_large(prog.meta.get("code"), args.large)
    name = os.path.splitext(os.path.basename(args.gadget))[0]
    return spec_from_program(prog, code, name)


def _cmd_verify(args) -> int:
    _gate_large(args.code, args.large)
    spec = _load_gadget(args)
    bases = {"z": ("z",), "x": ("x",), "both": ("z", "x")}[args.basis]
    job = VerificationJob(spec, args.t, bases=bases, mode=args.mode, solver=args.solver,
                          timeout=args.timeout, jobs=args.jobs, dump_smt=args.dump_smt, encoding=args.encoding)
    if find_solver(args.solver) is None:
        print("error: no SMT solver found (use --solver or FTQEC_SOLVER)", file=sys.stderr)
        return EXIT_ERROR
    v = verify(job)
    print(f"{spec.name}: {v.status} ({v.paths} paths, {v.queries} queries, {v.wall_time:.2f}s)")
    if v.reason:
        print(f"  {v.reason}")
    if v.counterexample is not None:
        print(v.counterexample.summary())
    if args.json:
        verdict_json(v, args.json)
    return EXIT_CODES.get(v.status, EXIT_ERROR)


def _cmd_list_codes(args) -> int:
    for name in code_names(include_large=True):
        c = builtin(name)
        tag = "  (large)" if is_large(name) else ""
        print(f"{name:<14} [[{c.n},{c.k},{c.d}]]{tag}")
    if args.gadgets:
        print()
        for g in builtin_gadget_names():
            print(g)
    return 0


def _cmd_gen_gadget(args) -> int:
    _gate_large(args.code, args.large)
    kwargs = {}
    if args.target:
        kwargs["target"] = args.target
    if args.repetitions is not None:
        kwargs["repetitions"] = args.repetitions
    spec = build_gadget(args.kind, load_code(args.code), **kwargs)
    text = pretty(spec.program)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return 0


def _cmd_oracle_check(args) -> int:
    with open(args.file) as fh:
        prog = parse(fh.read())
    code = load_code(args.code) if args.code else None
    spec = spec_from_program(prog, code, os.path.splitext(os.path.basename(args.file))[0])
    status, detail = oracle_verdict(spec, args.budget, mode=args.mode)
    print(f"{spec.name}: {status} (exhaustive, t={args.budget})")
    if detail:
        print(f"  {detail}")
    return EXIT_CODES[status]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ftqec", description=__doc__)
    p.add_argument("--version", action="version", version=f"ftqec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check a gadget for fault tolerance")
    v.add_argument("gadget", nargs="?", help=".cqp program")
    v.add_argument("--builtin", metavar="NAME", help="built-in gadget name (see list-codes --gadgets)")
    v.add_argument("--code", metavar="NAME", help="built-in code name or .stab file")
    v.add_argument("--t", type=int, required=True, help="fault budget")
    v.add_argument("--mode", choices=("ft", "ideal"), default="ft")
    v.add_argument("--basis", choices=("z", "x", "both"), default="both")
    v.add_argument("--solver", metavar="PATH")
    v.add_argument("--timeout", type=float, metavar="S", help="per-query solver timeout in seconds")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--dump-smt", metavar="DIR")
    v.add_argument("--json", metavar="OUT")
    v.add_argument("--encoding", choices=ENCODINGS, default=DEFAULT_ENCODING)
    v.add_argument("--large", action="store_true", help="allow distance-5 codes")
    v.set_defaults(func=_cmd_verify)

    lc = sub.add_parser("list-codes", help="show built-in codes")
    lc.add_argument("--gadgets", action="store_true", help="also list built-in gadgets")
    lc.set_defaults(func=_cmd_list_codes)

    g = sub.add_parser("gen-gadget", help="write a generated gadget as .cqp")
    g.add_argument("kind", choices=("prep", "cnot", "meas", "ec", "ec_bad_ordering", "ideal_ec"))
    g.add_argument("--code", required=True)
    g.add_argument("--target", choices=("zero", "one", "plus", "minus", "y"))
    g.add_argument("--repetitions", type=int)
    g.add_argument("-o", "--output")
    g.add_argument("--large", action="store_true")
    g.set_defaults(func=_cmd_gen_gadget)

    o = sub.add_parser("oracle-check", help="brute-force fault enumeration")
    o.add_argument("file")
    o.add_argument("--budget", type=int, required=True, help="fault budget t")
    o.add_argument("--code")
    o.add_argument("--mode", choices=("ft", "ideal"), default="ft")
    o.set_defaults(func=_cmd_oracle_check)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, KeyError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
