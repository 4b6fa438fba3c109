"""Command-line front end: ``holophase phase|sweep|validate|selftest``.

Exit codes: 0 success, 1 input or physics error, 2 geometric phase
undefined while ``--require-first-order`` is set.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import sys

import numpy as np

from .errors import HolophaseError, UnknownParameter
from .evolution import BUILTINS
from .runspec import dumps, execute, parse_run

EXIT_OK, EXIT_ERROR, EXIT_UNDEFINED = 0, 1, 2


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise HolophaseError(f"cannot read {path}: {exc.strerror}", "input") from exc
    except json.JSONDecodeError as exc:
        raise HolophaseError(f"{path} is not valid JSON: {exc}", "schema") from exc


def _fail(exc: HolophaseError) -> int:
    print(f"error [{exc.invariant}]: {exc}", file=sys.stderr)
    return EXIT_ERROR


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_phase(args) -> int:
    try:
        overrides = {"tol_phase": args.tol_phase} if args.tol_phase is not None else None
        run = parse_run(_load(args.spec), steps=args.steps, tol_overrides=overrides)
        doc, rep = execute(run)
    except HolophaseError as exc:
        return _fail(exc)
    _emit(dumps(doc), args.output)
    if rep.gamma_geo is None and args.require_first_order:
        print("geometric phase undefined: |zeta_geo| <= tol_phase", file=sys.stderr)
        return EXIT_UNDEFINED
    return EXIT_OK


def sweep_rows(doc: dict, param: str, start: float, stop: float, points: int, steps: int | None = None):
    evo = doc.get("evolution") or {}
    if evo.get("type") != "builtin" or param not in BUILTINS.get(evo.get("name"), ()):
        allowed = BUILTINS.get(evo.get("name"), ()) if evo.get("type") == "builtin" else ()
        raise UnknownParameter(
            f"cannot sweep {param!r}; the evolution exposes {sorted(allowed) or 'no builtin parameters'}"
        )
    rows = []
    for value in np.linspace(start, stop, points) if points > 0 else []:
        spec = copy.deepcopy(doc)
        spec["evolution"][param] = float(value)
        _, rep = execute(parse_run(spec, steps=steps))
        rows.append((float(value), rep.zeta_geo, rep.gamma_geo, rep.first_defined_order))
    return rows


def format_sweep(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "zeta_re", "zeta_im", "gamma", "first_defined_order"])
    for value, z, g, d in rows:
        w.writerow([repr(value), repr(z.real), repr(z.imag), "" if g is None else repr(g), "" if d is None else d])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.points < 0:
        print("error [sweep_points]: --points must be >= 0", file=sys.stderr)
        return EXIT_ERROR
    try:
        rows = sweep_rows(_load(args.spec), args.param, args.start, args.stop, args.points, args.steps)
    except HolophaseError as exc:
        return _fail(exc)
    _emit(format_sweep(rows), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        parse_run(_load(args.spec))
    except HolophaseError as exc:
        return _fail(exc)
    print("ok")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(trials=args.trials) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holophase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase", help="transport a run spec and report its geometric phases")
    p.add_argument("spec")
    p.add_argument("--tol-phase", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--require-first-order", action="store_true",
                   help="exit with status 2 when the first-order phase is undefined")
    p.set_defaults(func=cmd_phase)

    s = sub.add_parser("sweep", help="scan one builtin parameter and write CSV")
    s.add_argument("spec")
    s.add_argument("--param", required=True)
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--points", type=int, required=True)
    s.add_argument("--steps", type=int, default=None)
    s.add_argument("--output", "-o", default=None)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="check a run spec without transporting")
    v.add_argument("spec")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("selftest", help="run the oracle cross-checks (seed: HOLOPHASE_SEED)")
    t.add_argument("--trials", type=int, default=5)
    t.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
