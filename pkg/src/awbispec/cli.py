"""Command-line front end.

Subcommands:
  eval      evaluate polynomials and eigenvalues at exact rational points
  operator  dump operator coefficient tables as canonical JSON
  verify    run verification suites and write a JSON report

Parameter files are flat JSON objects {"d": int, "s": "p/q",
"alpha": ["p/q", ...]}; q is never given directly, only its square
root s, which keeps half-integer q-powers exact.  All output is
canonical: fixed key order, rationals as fraction strings, floats with
17 significant digits.  AWBISPEC_SEED overrides the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from gmpy2 import mpq

from .awcore import QParams, mv_poly, normalize_phat
from .duality import n_eigenvalue, n_operator_family
from .qdiff import (
    delta_form_operator,
    shift_form_operator,
    z_eigenvalue,
    z_operator_family,
)
from .qseries import QBase
from .report import fmt_float
from .verify import (
    CHECK_NAMES,
    DEFAULT_SEED,
    SuiteConfig,
    UnknownCheckError,
    default_params,
    run_suite,
)

SEED_ENV_VAR = "AWBISPEC_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SEED
    return int(raw)


def load_params(path: str) -> QParams:
    with open(path) as fh:
        obj = json.load(fh)
    base = QBase(mpq(obj["s"]), real_mode=bool(obj.get("real_mode", True)))
    return QParams(int(obj["d"]), base, tuple(mpq(a) for a in obj["alpha"]))


def _params_from_args(args) -> QParams:
    if args.params:
        return load_params(args.params)
    return default_params(args.d)


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(","))


def _parse_rationals(text: str) -> tuple[mpq, ...]:
    return tuple(mpq(t) for t in text.split(","))


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_eval(args) -> int:
    params = _params_from_args(args)
    n = _parse_ints(args.n) if args.n else None
    z = _parse_rationals(args.z) if args.z else None
    if args.mu:
        if n is None:
            raise SystemExit("--mu needs --n")
        value = z_eigenvalue(params, n, args.j)
        out = {"kind": "mu", "n": list(n), "j": args.j}
    elif args.kappa:
        if z is None:
            raise SystemExit("--kappa needs --z")
        value = n_eigenvalue(params, z, args.j)
        out = {"kind": "kappa", "z": [str(t) for t in z], "j": args.j}
    else:
        if n is None or z is None:
            raise SystemExit("eval needs --n and --z")
        value = mv_poly(params, n, z)
        kind = "poly"
        if args.phat:
            value = normalize_phat(params, n, value)
            kind = "phat"
        out = {"kind": kind, "n": list(n), "z": [str(t) for t in z]}
    out["value"] = str(value)
    out["value_float"] = fmt_float(float(value))
    _emit(out)
    return 0


def cmd_operator(args) -> int:
    params = _params_from_args(args)
    if args.family:
        if args.side == "n":
            op = n_operator_family(params)[args.family - 1]
        else:
            op = z_operator_family(params)[args.family - 1]
    elif args.form == "delta":
        op = delta_form_operator(params)
    else:
        op = shift_form_operator(params)
    out = {
        "d": params.d,
        "s": str(params.base.s),
        "alpha": [str(a) for a in params.alpha],
        "form": "family" if args.family else args.form,
        "support": op.to_json(),
    }
    _emit(out)
    return 0


def cmd_verify(args) -> int:
    if args.checks == "all":
        checks = CHECK_NAMES
    else:
        checks = tuple(t.strip() for t in args.checks.split(",") if t.strip())
    grid_m = None
    if args.grid:
        grid_m = {}
        for pair in args.grid.split(","):
            dstr, mstr = pair.split("=")
            grid_m[int(dstr)] = int(mstr)
    try:
        config = SuiteConfig(checks=checks, seed=args.seed, d=args.d, grid_m=grid_m)
    except UnknownCheckError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    reports = run_suite(config)
    payload = [r.to_json_dict() for r in reports]
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    ok = all(r.passed for r in reports)
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        sys.stderr.write(f"{status} {r.name} [{r.inputs}]\n")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awbispec",
        description="Multivariable Askey-Wilson polynomials and their bispectral operator algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="JSON parameter file {d, s, alpha}")
    common.add_argument("--d", type=int, default=2, help="dimension for default parameters")

    p_eval = sub.add_parser("eval", parents=[common], help="evaluate polynomials and eigenvalues")
    p_eval.add_argument("--n", help="comma-separated multi-index, e.g. 1,1")
    p_eval.add_argument("--z", help="comma-separated rational point, e.g. 2,3/5")
    p_eval.add_argument("--phat", action="store_true", help="apply the unit normalization")
    p_eval.add_argument("--mu", action="store_true", help="z-side eigenvalue for --n, --j")
    p_eval.add_argument("--kappa", action="store_true", help="n-side eigenvalue for --z, --j")
    p_eval.add_argument("--j", type=int, default=1, help="family index (1-based)")
    p_eval.set_defaults(fn=cmd_eval)

    p_op = sub.add_parser("operator", parents=[common], help="dump operator coefficients")
    p_op.add_argument("--form", choices=("shift", "delta"), default="shift")
    p_op.add_argument("--family", type=int, help="dump commuting-family member j instead")
    p_op.add_argument("--side", choices=("z", "n"), default="z")
    p_op.set_defaults(fn=cmd_operator)

    p_verify = sub.add_parser("verify", parents=[common], help="run verification checks")
    p_verify.add_argument("--checks", default="all", help="'all' or comma-separated check names")
    p_verify.add_argument("--seed", type=int, default=_default_seed())
    p_verify.add_argument("--out", help="report file path (default: stdout)")
    p_verify.add_argument("--grid", help="grid overrides, e.g. 1=256,2=64")
    p_verify.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
