"""Command line entry point.

Exit status is 0 on success or a true verdict, 1 on a false verdict, and 2 on
usage or input errors.  File arguments default to standard input/output, and
input formats are recognised by their header token or a leading ``{``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import builtin as builtins_mod
from .etr import (check_assignment, load_system, parse_assignment, serialize,
                  system_from_json, system_to_json)
from .exact import format_matrix, format_points, matroid_from_matrix, parse_matrix, parse_points
from .gadgets import CompiledMatroid, compile_system
from .matroid import (LineSet, format_matroid, from_lines, matroid_to_json, parse_matroid,
                      validate_axioms)
from .normalize import (etrami_polynomials, flatten_to_etrami, format_polys, parse_polys,
                        to_distinct, to_feasibility, to_strict_ineq)
from .order_type import parse_chirotope, simulate
from .realize import Realization, check_realization, read_value, realize
from .verify import DimensionMismatchError, verify_representation

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class Config:
    """Guards and output options shared by every subcommand."""

    def __init__(self, args):
        self.format = getattr(args, "format", "text")
        self.seed = getattr(args, "seed", 0)
        self.max_n = getattr(args, "max_n", 20)
        if self.max_n <= 0:
            raise ValueError("--max-n must be positive")


def _read(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _matroid(text: str):
    m = parse_matroid(text)
    return from_lines(m) if isinstance(m, LineSet) else m


def _emit_matroid(cfg: Config, m, path=None) -> None:
    if cfg.format == "json":
        _write(path, json.dumps(matroid_to_json(m)) + "\n")
    else:
        _write(path, format_matroid(m))


def _json_out(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, default=str) + "\n")


# --- subcommands -------------------------------------------------------------------

def cmd_axioms_check(args, cfg):
    m = _matroid(_read(args.file))
    rep = validate_axioms(m)
    if cfg.format == "json":
        _json_out({"ok": rep.ok, "kind": rep.kind, "witness": rep.witness, "bases": len(m.bases)})
    else:
        print("matroid: ok" if rep.ok else f"not a matroid: {rep.message} (witness {rep.witness})")
    return EXIT_OK if rep.ok else EXIT_FALSE


def cmd_from_matrix(args, cfg):
    a = parse_matrix(_read(args.file))
    _emit_matroid(cfg, matroid_from_matrix(a, max_cols=cfg.max_n))
    return EXIT_OK


def cmd_verify(args, cfg):
    m = _matroid(_read(args.matroid))
    a = parse_matrix(_read(args.matrix))
    out = verify_representation(m, a)
    if cfg.format == "json":
        _json_out(out.to_json())
    else:
        print(out.verdict if out.witness is None else f"{out.verdict} {out.witness}")
    return EXIT_OK if out.represents else EXIT_FALSE


def cmd_check(args, cfg):
    cs = load_system(_read(args.system))
    rep = check_assignment(cs, parse_assignment(_read(args.assignment)))
    if cfg.format == "json":
        _json_out(rep.to_json())
    else:
        for c, ok in rep.results:
            print(f"{'pass' if ok else 'FAIL'}  {c}")
        print("distinct" if rep.distinct else f"not distinct: {rep.collisions}")
    return EXIT_OK if rep.ok else EXIT_FALSE


def cmd_normalize(args, cfg):
    polys = parse_polys(_read(args.input))
    etrami = flatten_to_etrami(polys)
    meta = {"stage": args.stage, "etrami_constraints": len(etrami.constraints)}
    if args.stage == "etrami":
        out = serialize(etrami)
    else:
        p = to_feasibility(etrami_polynomials(etrami), len(etrami.vars))
        meta["feasibility_terms"] = len(p.terms)
        si = to_strict_ineq(p)
        meta.update(params=si.params.to_json(), chain_sizes=si.chain_sizes)
        if args.stage == "feasibility":
            out = format_polys([p])
        elif args.stage == "strictineq":
            out = json.dumps({"p": format_polys([p]), **meta}, sort_keys=True) + "\n"
        else:
            scale = None
            if args.test_scale:
                scale = tuple(Fraction(x) for x in args.test_scale)
                meta["test_scale"] = [str(x) for x in scale]
            ds = to_distinct(si, scale, names=etrami.vars)
            meta["distinct_constraints"] = len(ds.constraints)
            out = json.dumps(system_to_json(ds)) + "\n" if cfg.format == "json" else serialize(ds)
    _write(args.out, out)
    if args.meta:
        _write(args.meta, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_compile(args, cfg):
    cs = load_system(_read(args.system))
    cm = compile_system(cs)
    _emit_matroid(cfg, cm.line_set(), args.out)
    if args.trace:
        _write(args.trace, json.dumps({"system": system_to_json(cs), "compiled": cm.to_json()}) + "\n")
    return EXIT_OK


def cmd_realize(args, cfg):
    trace = json.loads(_read(args.trace))
    cm = CompiledMatroid.from_json(trace["compiled"])
    cs = system_from_json(trace["system"]) if "system" in trace else None
    r = realize(cm, parse_assignment(_read(args.assignment)), seed=cfg.seed, cs=cs)
    verdict = None
    if args.matroid:
        verdict = check_realization(r, _matroid(_read(args.matroid)))
    _write(args.out, format_points(r.config()))
    if cfg.format == "json":
        _json_out({"points": len(r.points), "represents": verdict, **r.metadata()})
    return EXIT_FALSE if verdict is False else EXIT_OK


def cmd_read_values(args, cfg):
    pc = parse_points(_read(args.points))
    r = Realization(list(pc.labels), list(pc.points), cfg.seed)
    values = {l[4:]: read_value(r, i) for i, l in enumerate(pc.labels) if l.startswith("var:")}
    if cfg.format == "json":
        _json_out({k: str(v) for k, v in values.items()})
    else:
        for k, v in values.items():
            print(f"{k} {v}")
    return EXIT_OK


def cmd_simulate_ot(args, cfg):
    sim = simulate(parse_chirotope(_read(args.input)))
    _emit_matroid(cfg, sim.cm.line_set(), args.out)
    if args.trace:
        _write(args.trace, json.dumps(sim.to_json()) + "\n")
    return EXIT_OK


def cmd_builtin(args, cfg):
    if args.matrix:
        _write(None, format_matrix(builtins_mod.builtin_matrix(args.name)))
    else:
        _emit_matroid(cfg, builtins_mod.builtin(args.name))
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-n", type=int, default=20, dest="max_n")

    p = argparse.ArgumentParser(prog="vonstaudt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("axioms-check", parents=[common], help="check the basis exchange axiom")
    s.add_argument("file", nargs="?")
    s.set_defaults(func=cmd_axioms_check)

    s = sub.add_parser("from-matrix", parents=[common], help="vector matroid of a matrix")
    s.add_argument("file", nargs="?")
    s.set_defaults(func=cmd_from_matrix)

    s = sub.add_parser("verify", parents=[common], help="does a matrix represent a matroid")
    s.add_argument("--matroid", required=True)
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("check", parents=[common], help="evaluate an assignment")
    s.add_argument("--system", required=True)
    s.add_argument("--assignment", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("normalize", parents=[common], help="polynomial system to Distinct-ETR")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--stage", choices=("etrami", "feasibility", "strictineq", "distinct"),
                   default="distinct")
    s.add_argument("--test-scale", nargs=2, metavar=("DELTA", "R"))
    s.add_argument("--out")
    s.add_argument("--meta")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("compile", parents=[common], help="constraint system to matroid")
    s.add_argument("--system", required=True)
    s.add_argument("--out")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("realize", parents=[common], help="exact points for a compiled matroid")
    s.add_argument("--trace", required=True)
    s.add_argument("--assignment", required=True)
    s.add_argument("--matroid")
    s.add_argument("--out")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("read-values", parents=[common], help="cross-ratio values of variable points")
    s.add_argument("--points", required=True)
    s.set_defaults(func=cmd_read_values)

    s = sub.add_parser("simulate-ot", parents=[common], help="matroid simulating an order type")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_simulate_ot)

    s = sub.add_parser("builtin", parents=[common], help="print a named matroid")
    s.add_argument("name", choices=builtins_mod.BUILTINS)
    s.add_argument("--matrix", action="store_true", help="print the bundled matrix instead")
    s.set_defaults(func=cmd_builtin)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, Config(args))
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
