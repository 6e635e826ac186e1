"""Command-line front end.

Subcommands: polygon, basis, torsion, rat, periods, verify, carlitz.  Run
specs are JSON files (see expr.parse_runspec); every report is deterministic
JSON (exact rationals as [numerator, denominator] pairs, no floats) with a
provenance block recording the spec hash, precision, and stopping diagnostics.
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from .core import DrinfeldModule
from .errors import DrinfeldError, SpecParseError
from .expr import parse_runspec
from .fields import get_config
from .laurent import NEG_INF, LaurentNum
from .rat import carlitz_reference, trivialize
from .tate import TateSeries, residue_at_theta
from .torsion import build_xi, moore_det, newton_polygon, strict_t_basis
from .verify import property_suite


def _jsonable(x):
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    if x == NEG_INF:
        return None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(obj, pretty):
    if pretty:
        print(json.dumps(_jsonable(obj), sort_keys=True, indent=2))
    else:
        print(json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":")))


def _load_spec(args):
    with open(args.spec) as fh:
        text = fh.read()
    spec = parse_runspec(json.loads(text))
    if args.t_trunc is not None:
        spec.t_trunc = args.t_trunc
    if args.prec is not None:
        spec.prec = args.prec
    if args.epsilon is not None:
        spec.epsilon_logq = _parse_epsilon(args.epsilon)
    digest = hashlib.sha256(
        json.dumps(json.loads(text), sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return spec, digest


def _parse_epsilon(text):
    s = text.strip()
    if s.startswith("q^"):
        s = s[2:]
    if "/" in s:
        n, d = s.split("/")
        val = Fraction(int(n), int(d))
    else:
        val = Fraction(int(s))
    return val if val < 0 else -val


def _provenance(spec, digest, report=None):
    prov = {"spec_sha256": digest,
            "field": spec.field,
            "precision": {"prec": spec.prec, "t_trunc": spec.t_trunc,
                          "epsilon_logq": spec.epsilon_logq,
                          "factor_budget": spec.factor_budget}}
    if report is not None:
        prov["delta_logq"] = report.delta_logq
        prov["factors_used"] = report.diagnostics.factors_used
    return prov


def cmd_polygon(args):
    spec, digest = _load_spec(args)
    phi = spec.build_module()
    poly = newton_polygon(phi)
    _emit({"polygon": poly.to_json(), "provenance": _provenance(spec, digest)}, args.pretty)


def cmd_basis(args):
    spec, digest = _load_spec(args)
    sel = build_xi(spec.build_module(), sign_targets=spec.build_sign_targets())
    det = moore_det(sel.basis)
    out = {"basis": [x.to_json() for x in sel.basis],
           "degrees": [x.deg for x in sel.basis],
           "moore_det_deg": det.deg,
           "polygon": sel.polygon.to_json(),
           "provenance": _provenance(spec, digest)}
    _emit(out, args.pretty)


def cmd_torsion(args):
    spec, digest = _load_spec(args)
    sel = build_xi(spec.build_module(), sign_targets=spec.build_sign_targets())
    _emit({"torsion": sel.to_json(), "provenance": _provenance(spec, digest)}, args.pretty)


def cmd_rat(args):
    spec, digest = _load_spec(args)
    report = trivialize(spec.build_module(), spec.rat_config(),
                        sign_targets=spec.build_sign_targets())
    out = report.to_json()
    out["provenance"] = _provenance(spec, digest, report)
    _emit(out, args.pretty)


def cmd_periods(args):
    spec, digest = _load_spec(args)
    report = trivialize(spec.build_module(), spec.rat_config(),
                        sign_targets=spec.build_sign_targets())
    out = {"periods": [p.to_json() for p in report.periods],
           "period_degrees": [p.deg for p in report.periods],
           "quasi": [[v.to_json() for v in row] for row in report.quasi],
           "residual_logq": report.diagnostics.residual_logq,
           "residual_bound_logq": report.diagnostics.residual_bound_logq,
           "agreement_logq": report.agreement_logq,
           "provenance": _provenance(spec, digest, report)}
    _emit(out, args.pretty)


def cmd_carlitz(args):
    q = args.q
    p, m = _factor_prime_power(q)
    M = args.M or (1 if p == 2 else 2)
    e = q - 1
    prec = args.prec if args.prec else 30 * e
    cfg = get_config(p, m, M, e, prec)
    T = args.t_trunc or 24
    pi_tilde, omega = carlitz_reference(cfg, T)
    th = LaurentNum.theta(cfg)
    tf = (TateSeries.from_poly(cfg, [-th, LaurentNum.one(cfg)], T) * omega).with_tail("theta-disk")
    res = residue_at_theta(tf)
    ok = (res + pi_tilde).is_zero()
    out = {"q": q, "pi_tilde": pi_tilde.to_json(), "pi_tilde_deg": pi_tilde.deg,
           "omega": omega.to_json(), "residue_check": "pass" if ok else "fail",
           "provenance": {"field": {"p": p, "m": m, "M": M, "e": e},
                          "precision": {"prec": prec, "t_trunc": T}}}
    _emit(out, args.pretty)
    if not ok:
        sys.exit(1)


def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            while q % p == 0:
                q //= p
                m += 1
            if q != 1:
                raise SpecParseError("q must be a prime power")
            return p, m
    raise SpecParseError("q must be a prime power")


def cmd_verify(args):
    ranks = (args.rank,) if args.rank else (2, 3)
    rep = property_suite(seed=args.seed, count=args.count, ranks=ranks)
    checks = []
    for k, rec in enumerate(rep["records"]):
        checks.append({"module": k, "rank": rec["rank"], "M": rec["M"], "e": rec["e"],
                       "N": rec["N"], "delta_logq": rec["delta_logq"],
                       "residual_logq": rec["residual_logq"],
                       "residual_bound_logq": rec["residual_bound_logq"],
                       "status": "pass"})
    out = {"seed": rep["seed"], "count": rep["count"], "skipped": rep["skipped"],
           "checks": checks, "all_pass": True}
    _emit(out, args.pretty)


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="drinfeld",
        description="Periods and quasi-periods of Drinfeld modules via "
                    "Frobenius-twisted infinite products")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, spec_required=True):
        if spec_required:
            sp.add_argument("--spec", required=True, help="run-spec JSON file")
        sp.add_argument("--t-trunc", type=int, dest="t_trunc", default=None)
        sp.add_argument("--prec", type=int, default=None)
        sp.add_argument("--epsilon", default=None, help="product tail target, e.g. q^-24")
        sp.add_argument("--pretty", action="store_true")
        sp.add_argument("--json", dest="pretty", action="store_false")

    for name, fn in (("polygon", cmd_polygon), ("basis", cmd_basis),
                     ("torsion", cmd_torsion), ("rat", cmd_rat),
                     ("periods", cmd_periods)):
        sp = sub.add_parser(name)
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("carlitz")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--M", type=int, default=None)
    common(sp, spec_required=False)
    sp.set_defaults(func=cmd_carlitz)

    sp = sub.add_parser("verify")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rank", type=int, default=None, choices=(2, 3))
    sp.add_argument("--count", type=int, default=1)
    common(sp, spec_required=False)
    sp.set_defaults(func=cmd_verify)

    args = ap.parse_args(argv)
    try:
        args.func(args)
    except DrinfeldError as exc:
        _emit(exc.payload(), getattr(args, "pretty", False))
        return 2
    except AssertionError as exc:
        _emit({"error": "InvariantViolation", "message": str(exc)},
              getattr(args, "pretty", False))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
