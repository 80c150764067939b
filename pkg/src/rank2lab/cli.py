"""Command-line front end: build-rep | check-identities | solve | verify.

Every command writes one JSON report; the output path is ``--out`` or a
default name inside ``$RANK2LAB_OUT`` (current directory if unset).  Exit code
0 means everything checked passed, 1 means a check failed, 2 is a usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from .algebra import UnknownAlgebra, as_algebra
from .identities import regular_sample, run_suite
from .lax import SYSTEMS, UnknownCoefficient, load_coefficients
from .reps import build_fundamental, dump_rep, pair
from .solutions import dump_solution, solve_exact, solve_numeric
from .systems import CONVENTIONS, default_coefficients, verify_system

OUT_ENV = "RANK2LAB_OUT"


def _out_path(args, default_name: str) -> Path:
    if args.out:
        path = Path(args.out)
    else:
        path = Path(os.environ.get(OUT_ENV, ".")) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def _coeffs(args):
    if args.coeffs:
        co = load_coefficients(args.coeffs)
        if co.system != args.system:
            raise UnknownCoefficient(f"coefficient file is for {co.system}, not {args.system}")
        return co
    return default_coefficients(args.system, args.seed)


def cmd_build_rep(args) -> int:
    rep = build_fundamental(args.algebra, args.fundamental)
    path = _out_path(args, f"rep-{as_algebra(args.algebra).name}-{args.fundamental}.json")
    dump_rep(rep, path)
    print(f"{rep.algebra.name} fundamental {args.fundamental}: dim {rep.dim} -> {path}")
    return 0


def cmd_check_identities(args) -> int:
    name = as_algebra(args.algebra).name
    reports = run_suite(name, trials=args.trials, seed=args.seed) if args.trials > 0 else []
    ok = all(r["failures"] == 0 for r in reports)
    data = {"algebra": name, "trials": args.trials, "seed": args.seed, "pass": ok,
            "reports": reports, "conventions": CONVENTIONS}
    if args.trials == 0:
        data["warning"] = "trials=0: nothing was checked (vacuous pass)"
    path = _out_path(args, f"identities-{name}.json")
    _write(path, data)
    for r in reports:
        print(f"{r['identity']:<22} {name}: {r['failures']} failures / {r['trials']} trials")
    print(("PASS" if ok else "FAIL") + f" -> {path}")
    return 0 if ok else 1


def _dressing(args):
    """Random Gauss-factored constant group element for ``--dressing-seed`` (else None)."""
    if args.dressing_seed is None:
        return None
    return regular_sample(pair(SYSTEMS[args.system].algebra), args.dressing_seed)


def cmd_solve(args) -> int:
    co = _coeffs(args)
    path = _out_path(args, f"solution-{args.system}-{args.mode}.json")
    if args.mode == "exact":
        sol = solve_exact(args.system, co, dressing=_dressing(args))
        dump_solution(sol, path)
    else:
        sol = solve_numeric(args.system, co, (1, 1), Fraction(args.step), args.precision,
                            dressing=_dressing(args))
        rng = random.Random(args.seed)
        pts = sorted({(rng.randint(0, sol.nx), rng.randint(0, sol.ny)) for _ in range(args.points)})
        dump_solution(sol, path, pts)
    print(f"{args.system} {args.mode} solution -> {path}")
    return 0


def cmd_verify(args) -> int:
    co = _coeffs(args)
    report = verify_system(args.system, co, args.mode, args.points, args.seed,
                           args.precision, Fraction(args.step), dressing=_dressing(args))
    path = _out_path(args, f"verify-{args.system}-{args.mode}.json")
    report.dump(path)
    for eq, v in report.max_residuals.items():
        print(f"{eq:<12} max |residual| = {v}")
    print(("PASS" if report.passed else "FAIL") + f" (tolerance {report.tolerance}) -> {path}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rank2lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help=f"output file (default: inside ${OUT_ENV})")

    p = sub.add_parser("build-rep", help="build a fundamental representation")
    p.add_argument("--algebra", required=True)
    p.add_argument("--fundamental", type=int, choices=(1, 2), required=True)
    common(p)
    p.set_defaults(fn=cmd_build_rep)

    p = sub.add_parser("check-identities", help="run the Jacobi / Appendix identity suite")
    p.add_argument("--algebra", required=True)
    p.add_argument("--trials", type=int, default=100)
    common(p)
    p.set_defaults(fn=cmd_check_identities)

    for name, fn, helptext in (("solve", cmd_solve, "compute the general solution K"),
                               ("verify", cmd_verify, "verify an integrable system on K")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--system", required=True, choices=sorted(SYSTEMS))
        p.add_argument("--mode", choices=("exact", "numeric"), default="exact")
        p.add_argument("--coeffs", help="coefficient file (JSON or TOML)")
        p.add_argument("--points", type=int, default=20)
        p.add_argument("--precision", type=int, default=60, help="decimal digits for floating modes")
        p.add_argument("--step", default="1/50", help="RK4 step (rational string)")
        p.add_argument("--dressing-seed", type=int, help="dress K = M+ G M- with a random constant G")
        common(p)
        p.set_defaults(fn=fn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (UnknownAlgebra, UnknownCoefficient, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
