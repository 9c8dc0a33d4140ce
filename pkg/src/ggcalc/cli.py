"""Command-line front end.

Subcommands mirror the library layers: ``group`` (validation and group
law), ``tau`` (admissibility and symmetry), ``coeffs`` (rational
coefficient tables), ``expand`` (formal expansions), ``poisson``
(first-stratum bracket data) and ``numeric`` (grid oracles).  All output
is deterministic: fixed orderings, rationals as "p/q", floats printed
with 15 significant digits.

Exit codes: 0 success, 1 validation/solver failure, 2 parse error,
3 numeric residual above tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import group as grp
from . import numeric as num
from .expansion import (
    adjoint_expansion,
    change_expansion,
    compose_expansion,
    poisson_check,
    render,
)
from .invariant import CanonicalBasis, M_MAX_DEFAULT
from .poly import ParseError, render_poly
from .taucalc import (
    CoefficientTable,
    adjoint_coeffs,
    builtin_tau,
    change_coeffs,
    composition_coeffs,
    heisenberg_matrix_rep,
    is_symmetric,
    mr_tau,
    poisson_bracket_spec,
    tau_from_json,
    tau_to_json,
    validate_hp,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_TOLERANCE = 3


def _max_weight_default() -> int:
    env = os.environ.get("GGC_MAX_WEIGHT")
    return int(env) if env else M_MAX_DEFAULT


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_group(path_or_name: str):
    try:
        return grp.load_algebra(path_or_name)
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        raise SystemExit(_parse_error(f"cannot load group: {exc}"))


def _parse_error(msg: str) -> int:
    sys.stderr.write(msg + "\n")
    return EXIT_PARSE


def _load_tau(law, spec: str):
    """tau argument: a builtin name (kn | right | half-log | mr) or a JSON file."""
    name = spec.replace("-", "_")
    if name in ("kn", "right", "half_log"):
        return builtin_tau(law, name)
    if name == "mr":
        return mr_tau(heisenberg_matrix_rep(law))
    try:
        with open(spec) as fh:
            return tau_from_json(law, json.load(fh))
    except FileNotFoundError:
        raise SystemExit(_parse_error(f"unknown tau {spec!r} (not builtin, not a file)"))
    except (ValueError, KeyError, ParseError) as exc:
        raise SystemExit(_parse_error(f"cannot parse tau: {exc}"))


def _float_repr(x: float) -> str:
    return format(float(x), ".15g")


# -- subcommand handlers ------------------------------------------------------------


def cmd_group(args) -> int:
    alg = _load_group(args.group)
    if args.action == "validate":
        report = grp.validate_algebra(alg)
        if args.json:
            payload = {
                "name": alg.name,
                "ok": report.ok,
                "violations": [
                    {"kind": v.kind, "indices": [i + 1 for i in v.indices], "detail": v.detail}
                    for v in report.violations
                ],
            }
            _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
        else:
            lines = [f"group {alg.name}: {'ok' if report.ok else 'INVALID'}"]
            lines += [f"  {v}" for v in report.violations]
            _emit("\n".join(lines), args.out)
        return EXIT_OK if report.ok else EXIT_FAIL
    # action == law
    try:
        law = grp.bch_group_law(alg)
    except grp.GroupValidationError as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_FAIL
    if args.json:
        payload = {
            "name": alg.name,
            "weights": list(alg.weights),
            "law": [render_poly(R) for R in law.R],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    else:
        _emit("\n".join(render_poly(R) for R in law.R), args.out)
    return EXIT_OK


def cmd_tau(args) -> int:
    alg = _load_group(args.group)
    law = grp.bch_group_law(alg)
    if args.action == "builtin":
        tau = _load_tau(law, args.tau)
        _emit(json.dumps(tau_to_json(tau), indent=2, sort_keys=True), args.out)
        return EXIT_OK
    tau = _load_tau(law, args.tau)
    report = validate_hp(tau)
    symmetric, witness = is_symmetric(tau)
    if args.json:
        payload = {
            "tau": tau.name,
            "hp_ok": report.ok,
            "coordinates": [
                {
                    "status": v.status,
                    "leading": str(v.leading) if v.leading is not None else None,
                    "reason": v.reason,
                }
                for v in report.verdicts
            ],
            "symmetric": symmetric,
            "residual": render_poly(witness) if witness is not None else None,
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    else:
        bits = []
        for j, v in enumerate(report.verdicts):
            if v.status == "valid":
                bits.append(f"c{j + 1}: valid (leading {v.leading})")
            elif v.status == "zero":
                bits.append(f"c{j + 1}: zero")
            else:
                bits.append(f"c{j + 1}: invalid ({v.reason})")
        lines = [f"HP: {'ok' if report.ok else 'violated'}"] + [f"  {b}" for b in bits]
        if symmetric:
            lines.append("symmetric: yes")
        else:
            lines.append(f"symmetric: no; residual: {render_poly(witness)}")
        _emit("\n".join(lines), args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_coeffs(args) -> int:
    alg = _load_group(args.group)
    law = grp.bch_group_law(alg)
    tau = _load_tau(law, args.tau)
    M = args.max_weight
    basis = CanonicalBasis(law, M)
    try:
        if args.kind == "change":
            direction = "kn_to_tau" if args.reverse else "tau_to_kn"
            tables = [change_coeffs(tau, direction, M, basis)]
        elif args.kind == "adjoint":
            tables = [adjoint_coeffs(tau, M, basis)]
        else:
            tables = list(composition_coeffs(tau, M, basis))
    except Exception as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_FAIL
    payload = [t.to_json() for t in tables]
    _emit(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2, sort_keys=True), args.out)
    return EXIT_OK


def cmd_expand(args) -> int:
    alg = _load_group(args.group)
    law = grp.bch_group_law(alg)
    tau = _load_tau(law, args.tau)
    M = args.orders
    basis = CanonicalBasis(law, M)
    if args.kind == "compose":
        exp = compose_expansion(tau, M, basis)
    elif args.kind == "adjoint":
        exp = adjoint_expansion(tau, M, basis)
    else:
        direction = "kn_to_tau" if args.reverse else "tau_to_kn"
        exp = change_expansion(tau, direction, M, basis)
    _emit(render(exp, "json" if args.json else "text"), args.out)
    return EXIT_OK


def cmd_poisson(args) -> int:
    alg = _load_group(args.group)
    law = grp.bch_group_law(alg)
    try:
        spec = poisson_bracket_spec(law)
    except Exception as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_FAIL
    payload = {
        "group": alg.name,
        "first_stratum": [j + 1 for j in spec.first_stratum],
        "bracket": "(-i) * sum_j [(X^{e_j} s1)(D^{e_j} s2) - (D^{e_j} s1)(X^{e_j} s2)]",
    }
    if args.tau is not None:
        tau = _load_tau(law, args.tau)
        ok, offending = poisson_check(law, tau)
        payload["order1_matches_half_bracket"] = ok
        if not ok:
            payload["offending"] = [str(o) for o in offending]
    if args.json:
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    else:
        lines = [f"group {alg.name}: first stratum indices "
                 + " ".join(str(j + 1) for j in spec.first_stratum)]
        if args.tau is not None:
            lines.append(f"order-1 term matches half bracket: "
                         f"{'yes' if payload['order1_matches_half_bracket'] else 'NO'}")
        _emit("\n".join(lines), args.out)
    if args.tau is not None and not payload["order1_matches_half_bracket"]:
        return EXIT_FAIL
    return EXIT_OK


def cmd_numeric(args) -> int:
    grid = num.Grid(args.grid, args.period * np.pi)
    lam = args.lam
    reports = []
    if args.check == "adjoint-check":
        sym = num.EuclidSymbol.from_poly({(1, 1): 1})
        r_w = num.adjoint_check(sym, Fraction(1, 2), grid)
        r_kn = num.adjoint_check(sym, Fraction(0), grid)
        reports.append(num.residual_report("adjoint-weyl", grid, {"symbol": "x xi", "t": "1/2"}, r_w, args.tol))
        kn_report = num.residual_report("adjoint-kn-lower-bound", grid, {"symbol": "x xi", "t": "0"}, r_kn, args.tol)
        kn_report["pass"] = bool(r_kn >= 1e-3)
        reports.append(kn_report)
    elif args.check == "moyal-check":
        pairs = [
            ("xi,x", {(0, 1): 1}, {(1, 0): 1}),
            ("xxi,xxi", {(1, 1): 1}, {(1, 1): 1}),
            ("x2xi,xxi2", {(2, 1): 1}, {(1, 2): 1}),
        ]
        for name, p1, p2 in pairs:
            s1 = num.EuclidSymbol.from_poly(p1)
            s2 = num.EuclidSymbol.from_poly(p2)
            m_star = num.terminating_order(s1, s2)
            r = num.moyal_exactness_check(s1, s2, grid, m_star)
            reports.append(
                num.residual_report("moyal", grid, {"symbols": name, "order": m_star}, r, args.tol)
            )
    elif args.check == "rep-check":
        rng = np.random.default_rng(20240901)
        pairs = [
            (tuple(rng.uniform(-0.5, 0.5, 3)), tuple(rng.uniform(-0.5, 0.5, 3)))
            for _ in range(4)
        ]
        r_hom = num.rep_homomorphism_residual(lam, grid, pairs)
        r_char = num.central_character_residual(lam, 0.7, grid)
        r_sub = num.sublaplacian_symbol_check(lam, grid)
        reports.append(num.residual_report("rep-homomorphism", grid, {"lambda": lam}, r_hom, args.tol))
        reports.append(num.residual_report("central-character", grid, {"lambda": lam, "t": 0.7}, r_char, min(args.tol, 1e-10)))
        reports.append(num.residual_report("sublaplacian", grid, {"lambda": lam}, r_sub, max(args.tol, 1e-5)))
    elif args.check == "metaplectic-check":
        for kind, param in (("dilation", 1.0), ("dilation", 2.0), ("chirp", 0.5), ("J", 1.0)):
            r = num.metaplectic_check(lam, kind, grid, param)
            reports.append(
                num.residual_report("metaplectic", grid, {"kind": kind, "param": param, "lambda": lam}, r, args.tol)
            )
    else:
        return _parse_error(f"unknown numeric check {args.check!r}")
    for rep in reports:
        rep["residual"] = float(f"{rep['residual']:.15g}")
    text = json.dumps(reports if len(reports) > 1 else reports[0], indent=2, sort_keys=True)
    _emit(text, args.out)
    return EXIT_OK if all(r["pass"] for r in reports) else EXIT_TOLERANCE


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ggcalc",
        description="Exact symbolic calculus and numeric oracles for quantizations on graded groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="write output to a file")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p_group = sub.add_parser("group", help="validate a group or print its law")
    p_group.add_argument("action", choices=["validate", "law"])
    p_group.add_argument("group", help="catalog name or JSON file")
    common(p_group)

    p_tau = sub.add_parser("tau", help="validate a quantizing function")
    p_tau.add_argument("action", choices=["validate", "builtin"])
    p_tau.add_argument("group")
    p_tau.add_argument("tau", help="builtin name (kn|right|half-log|mr) or JSON file")
    common(p_tau)

    p_coeffs = sub.add_parser("coeffs", help="emit coefficient tables")
    p_coeffs.add_argument("kind", choices=["change", "adjoint", "compose"])
    p_coeffs.add_argument("group")
    p_coeffs.add_argument("tau")
    p_coeffs.add_argument("--max-weight", type=int, default=None)
    p_coeffs.add_argument("--reverse", action="store_true",
                          help="for change: expand the inverse direction")
    common(p_coeffs)

    p_expand = sub.add_parser("expand", help="emit formal expansions")
    p_expand.add_argument("kind", choices=["compose", "adjoint", "change"])
    p_expand.add_argument("group")
    p_expand.add_argument("tau")
    p_expand.add_argument("--orders", type=int, default=2)
    p_expand.add_argument("--reverse", action="store_true")
    common(p_expand)

    p_poisson = sub.add_parser("poisson", help="first-stratum bracket data")
    p_poisson.add_argument("group")
    p_poisson.add_argument("tau", nargs="?", default=None,
                           help="optionally check the order-1 expansion term")
    common(p_poisson)

    p_num = sub.add_parser("numeric", help="run grid oracles")
    p_num.add_argument("check", choices=[
        "adjoint-check", "moyal-check", "rep-check", "metaplectic-check",
    ])
    p_num.add_argument("--grid", type=int, default=128)
    p_num.add_argument("--period", type=float, default=16.0,
                       help="period in units of pi")
    p_num.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_num.add_argument("--tol", type=float, default=1e-6)
    common(p_num)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage, which matches the parse-error code
        return int(exc.code) if exc.code else EXIT_OK
    if args.command == "coeffs" and args.max_weight is None:
        args.max_weight = _max_weight_default()
    handlers = {
        "group": cmd_group,
        "tau": cmd_tau,
        "coeffs": cmd_coeffs,
        "expand": cmd_expand,
        "poisson": cmd_poisson,
        "numeric": cmd_numeric,
    }
    try:
        return handlers[args.command](args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_PARSE
    except ParseError as exc:
        return _parse_error(str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
