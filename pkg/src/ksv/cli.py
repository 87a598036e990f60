"""The ``ksv`` command line. Each subcommand maps to one ``_cmd_*`` function."""

from __future__ import annotations

import argparse
import json
import sys

from .driver import EXIT_INPUT, EXIT_OK, default_window, execute, load
from .dsl import ParseError, parse_polynomial
from .extdg import ExteriorAlgebra
from .polyring import HomogeneousIdeal
from .scalars import GF, QQ
from .varieties import VarietyHandle, join


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise _InputError(f"{path}: {exc}") from None


class _InputError(Exception):
    pass


def _cmd_check(args):
    ctx = load(_read(args.file))
    print(f"{args.file}: ok ({len(ctx.modules)} modules, {len(ctx.session.directives)} directives)")
    return EXIT_OK


def _cmd_run(args):
    text = _read(args.file)
    window = args.window if args.window is not None else default_window()
    report = execute(text, window=window, jobs=args.jobs)
    out = report.to_json(args.timing) if args.format != "text" else report.to_text(args.timing)
    sys.stdout.write(out)
    return report.exit_code


def _field(name):
    if name in ("Q", "QQ"):
        return QQ
    if name.startswith("F"):
        return GF(int(name[1:]))
    raise _InputError(f"unknown field {name!r} (use Q or F<p>)")


def _cmd_join(args):
    F = _field(args.field)
    weights = [int(w) for w in args.weights.split(",")] if args.weights else [2]
    if len(weights) == 1:
        weights *= args.vars
    if len(weights) != args.vars:
        raise _InputError(f"expected {args.vars} weights, got {len(weights)}")
    if any(w <= 0 or w % 2 for w in weights):
        raise _InputError("weights must be positive and even")
    S = ExteriorAlgebra(args.vars, [w - 1 for w in weights], F).symmetric_ring()
    if len(args.ideal) != 2:
        raise _InputError("give exactly two --ideal options")
    handles = []
    for text in args.ideal:
        gens = [parse_polynomial(g, S) for g in _split_gens(text)]
        try:
            handles.append(VarietyHandle(HomogeneousIdeal(S, gens)))
        except ValueError as exc:
            raise _InputError(f"ideal {text!r}: {exc}") from None
    J = join(*handles)
    print(json.dumps({"ring": list(S.names), "weights": list(S.weights), "join": J.describe()},
                     sort_keys=True, ensure_ascii=False))
    return EXIT_OK


def _split_gens(text):
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur)
    return [g for g in out if g.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ksv", description="Support varieties of DG modules over Koszul complexes.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and validate a .ksv file")
    c.add_argument("file")
    c.set_defaults(func=_cmd_check)

    r = sub.add_parser("run", help="execute the directives of a .ksv file")
    r.add_argument("file")
    r.add_argument("--window", type=int, default=None,
                   help="default window for directives without one (env KSV_DEFAULT_WINDOW, else 6)")
    r.add_argument("--format", choices=["text", "json", "json-like-canonical"], default="text",
                   help="json-like-canonical is an alias for json")
    r.add_argument("--jobs", type=int, default=1, help="worker processes")
    r.add_argument("--timing", action="store_true", help="append wall-clock timings (not canonical)")
    r.set_defaults(func=_cmd_run)

    j = sub.add_parser("join", help="join of two cones in Proj k[chi1..chic]")
    j.add_argument("--vars", type=int, required=True, help="number of variables c")
    j.add_argument("--weights", default=None, help="comma-separated even weights (default 2)")
    j.add_argument("--field", default="Q", help="Q or F<p>, e.g. F5")
    j.add_argument("--ideal", action="append", default=[], help="comma-separated generators")
    j.set_defaults(func=_cmd_join)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{getattr(args, 'file', 'input')}:{exc.line}:{exc.col}: error: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except (_InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
