"""Command line front end.

Every subcommand reads one JSON input (file or ``-`` for stdin), validates it
against the shipped schema, calls the library and prints a JSON report with
sorted keys.  Exit codes: 2 bad input, 3 precondition, 4 invariant,
5 precision.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

import jsonschema

from .errors import QPadicError, ValidationError
from .padic import PrecisionPolicy, rational_from_json, rational_to_json
from .qcalc import QContext

COMMANDS = ("expand", "radius", "qtype", "effbound", "phi", "regsing-solve", "frobenius", "deform", "verify")
SCHEMA_VERSION = 1


def load_schema(name: str) -> dict:
    text = resources.files("qpadic").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name: str) -> None:
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"{name} input: {exc.message}") from None


def _read_json(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read JSON from {path}: {exc}") from None


def build_context(cfg: dict) -> QContext:
    validate(cfg, "config")
    p = int(cfg.get("p", 3))
    q = cfg.get("q", "one_plus_p")
    prec = cfg.get("precision", {})
    base = PrecisionPolicy(int(prec.get("padic_digits", 64)), int(prec.get("series_order", 128)))
    pol = PrecisionPolicy.from_env(base)
    q = None if q == "one_plus_p" else rational_from_json(q)
    return QContext(p, q, pol.padic_digits, pol.series_order)


def _system(doc, ctx):
    from .series import RationalFunction
    from .systems import QDiffSystem
    return QDiffSystem([[RationalFunction.from_json(f) for f in r] for r in doc["matrix"]], ctx)


def _rat(doc, key, default=0):
    return rational_from_json(doc[key]) if key in doc else Fraction(default)


def _matrix_json(m):
    return [[rational_to_json(x) for x in r] for r in m]


# ---------------------------------------------------------------------------
# subcommands


def cmd_expand(doc, ctx, args):
    from .series import RationalFunction
    from .twisted import to_twisted
    f = RationalFunction.from_json(doc["f"])
    N = int(doc.get("N", min(ctx.N, 32)))
    g = to_twisted(f, _rat(doc, "xi"), ctx, N)
    return g.to_json()


def cmd_radius(doc, ctx, args):
    from .systems import generic_radius_estimate
    sys_ = _system(doc, ctx)
    g = generic_radius_estimate(sys_, _rat(doc, "xi"), _rat(doc, "r"), int(doc.get("n_max", 64)),
                                cap=max(args.horizon or 256, 64))
    return g.to_json()


def cmd_qtype(doc, ctx, args):
    from .qcalc import q_type
    t = q_type(rational_from_json(doc["alpha"]), ctx, args.horizon or 2000, doc.get("mode", "direct"))
    return t.to_json()


def cmd_effbound(doc, ctx, args):
    from .qcalc import eff_bound_const
    out = {}
    if "n" in doc:
        out["constant"] = eff_bound_const(int(doc["n"]), int(doc.get("mu", 2)) - 1, ctx).to_json()
    if "matrix" in doc:
        from .series import RationalFunction
        from .systems import effective_bound_check
        sys_ = _system(doc, ctx)
        if "solution" not in doc:
            raise ValidationError("effbound on a system needs a solution matrix")
        Y = [[RationalFunction.from_json(f) for f in r] for r in doc["solution"]]
        rows = effective_bound_check(sys_, Y, _rat(doc, "xi"), _rat(doc, "r"), args.horizon or 64)
        out["rows"] = [{"n": n, "lhs": _exp(l), "rhs": _exp(r), "slack": _exp(s)} for n, l, r, s in rows]
    if not out:
        raise ValidationError("effbound needs n or a system")
    return out


def _exp(x):
    from .qcalc import LogRadius
    return LogRadius(x).to_json()


def cmd_phi(doc, ctx, args):
    from .qcalc import phi_radius, phi_radius_prediction
    a = rational_from_json(doc["alpha"])
    H = args.horizon or 2000
    m = phi_radius(a, ctx, H)
    pr = phi_radius_prediction(a, ctx, H)
    return {"measured": m.to_json(), "prediction": pr.to_json(with_rows=False)}


def cmd_regsing(doc, ctx, args):
    from .regsing import radius_of_gauge, regular_singular_solve, transfer_bound
    from .systems import generic_radius_estimate
    sys_ = _system(doc, ctx)
    eigs = [rational_from_json(e) for e in doc["eigenvalues"]]
    from .regsing import check_spectrum
    check_spectrum([[f(0) for f in r] for r in sys_.A], eigs)
    sol = regular_singular_solve(sys_)
    r = radius_of_gauge(sol, ctx.p)
    if "chi" in doc:
        chi, cert = rational_from_json(doc["chi"]), bool(doc.get("chi_certified", True))
    else:
        g = generic_radius_estimate(sys_)
        chi, cert = g.chi, g.certified
    b = transfer_bound(chi, eigs, ctx, cert, args.horizon or 2000)
    return {"U": [_matrix_json(m) for m in sol.U], "residual_order": sol.residual_order,
            "radius": r.to_json(), "bounds": b.to_json(),
            "bound_holds": r.log_radius.r <= b.bound.r}


def cmd_frobenius(doc, ctx, args):
    from .frobenius import (eigenvalue_distance, frobenius_F, frobenius_H, lambda_series_radius,
                            poles_off_unit_disk, reconstruct_F)
    sys_ = _system(doc, ctx)
    ell = int(doc.get("ell", 1))
    eigs = [rational_from_json(e) for e in doc["eigenvalues"]] if "eigenvalues" in doc else None
    H = frobenius_H(sys_, ell, eigs=eigs, force=args.force)
    F = frobenius_F(sys_, H, strict=not args.force)
    out = {"H": [_matrix_json(m) for m in H.coeffs], "H_precision": H.precision}
    out.update(F.to_json())
    Fr = reconstruct_F(F, ctx.p)
    out["F_rational"] = None if Fr is None else [[f.to_json() for f in r] for r in Fr]
    out["F_poles_off_unit_disk"] = None if Fr is None else poles_off_unit_disk(Fr, ctx.p)
    if eigs:
        out["eigenvalues"] = [{"lambda": rational_to_json(e), "distance": eigenvalue_distance(e, ctx).to_json(),
                               "lambda_series": lambda_series_radius(e, ctx).to_json(with_rows=False)}
                              for e in eigs]
    return out


def cmd_deform(doc, ctx, args):
    from .series import RationalFunction
    from .systems import q_deformation_run
    G = [[RationalFunction.from_json(f) for f in r] for r in doc["matrix"]]
    rep = q_deformation_run(G, _rat(doc, "xi"), [int(k) for k in doc["ks"]], _rat(doc, "r"),
                            int(doc.get("N", 40)), ctx)
    return rep.to_json()


HANDLERS = {"expand": cmd_expand, "radius": cmd_radius, "qtype": cmd_qtype, "effbound": cmd_effbound,
            "phi": cmd_phi, "regsing-solve": cmd_regsing, "frobenius": cmd_frobenius, "deform": cmd_deform}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpadic", description="p-adic q-difference equation toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (p, q, precision, horizon)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--horizon", type=int, help="horizon for radius statistics")
    common.add_argument("--force", action="store_true", help="proceed on uncertified hypotheses")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("--suite", action="append", default=None,
                            help="suite name (repeatable); 'all' runs everything")
        else:
            sp.add_argument("input", help="input JSON file, or - for stdin")
    return ap


def run(argv=None) -> tuple:
    """Returns (exit code, report dict or None, error message)."""
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)    # exact rationals get long
    args = build_parser().parse_args(argv)
    try:
        cfg = _read_json(args.config) if args.config else {}
        ctx = build_context(cfg)
        if args.horizon is None and "horizon" in cfg:
            args.horizon = int(cfg["horizon"])
        if args.command == "verify":
            from .verify import SUITES, run_suites
            names = args.suite or ["all"]
            bad = [n for n in names if n != "all" and n not in SUITES]
            if bad:
                raise ValidationError(f"unknown suite {bad[0]}")
            result = {"suites": run_suites(names, ctx)}
            failed = sum(1 for rows in result["suites"].values() for r in rows if not r["passed"])
            result["failed"] = failed
            code = 0 if failed == 0 else 4
        else:
            doc = _read_json(args.input)
            validate(doc, args.command)
            result = HANDLERS[args.command](doc, ctx, args)
            code = 0
    except QPadicError as exc:
        return exc.exit_code, None, f"{type(exc).__name__}: {exc}"
    report = {"command": args.command, "schema_version": SCHEMA_VERSION,
              "config": {"p": ctx.p, "q": rational_to_json(ctx.q),
                         "precision": {"padic_digits": ctx.M, "series_order": ctx.N}},
              "result": result}
    validate(report, "report")
    return code, report, ""


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def main(argv=None) -> int:
    code, report, msg = run(argv)
    if report is None:
        print(f"qpadic: {msg}", file=sys.stderr)
        return code
    text = dumps(report)
    args = build_parser().parse_args(argv)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
