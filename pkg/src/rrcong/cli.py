"""Command-line interface: ``rrc <command> [options]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import etaquot, induction, operators, partition
from .qseries import DEFAULT_DEPTH, dec

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MIN_PRECISION = 16


@dataclass
class Check:
    name: str
    passed: bool | None  # None means skipped
    details: dict = field(default_factory=dict)
    window: int | None = None

    @property
    def status(self) -> str:
        return "skipped" if self.passed is None else ("pass" if self.passed else "fail")

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "details": self.details,
                "window": self.window}


@dataclass
class Report:
    command: str
    parameters: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    elapsed_ms: int | None = None

    @property
    def failed(self) -> bool:
        return any(c.passed is False for c in self.checks)

    def to_json(self) -> dict:
        out = {"command": self.command, "parameters": self.parameters,
               "status": "fail" if self.failed else "pass",
               "checks": [c.to_json() for c in self.checks]}
        if self.data:
            out["data"] = self.data
        if self.elapsed_ms is not None:
            out["elapsed_ms"] = self.elapsed_ms
        return out


def _from_result(res: operators.CheckResult) -> Check:
    details = {"coefficients_compared": res.compared}
    if res.detail:
        details["mismatch"] = res.detail
    return Check(res.name, res.passed, details, res.window)


def cmd_verify_relations(args) -> Report:
    window = args.precision
    rels = operators.load_relations(args.relations) if args.relations else None
    rep = Report("verify-relations", {"window": window, "relations": args.relations or "builtin"})
    for res in operators.verify_group_relations(window, 4 if args.parallel else 1, rels):
        rep.checks.append(_from_result(res))
    rep.checks.append(_from_result(operators.verify_principal_part_example(window)))
    return rep


def cmd_verify_modeq(args) -> Report:
    rep = Report("verify-modeq", {"precision": args.precision})
    rep.checks.append(_from_result(operators.verify_modeq(args.precision)))
    try:
        s = operators.s_coeffs()
        rep.checks.append(Check("s(j,l) integral", True,
                                {"s": {f"{j},{l}": v for (j, l), v in sorted(s.items())}}))
    except operators.NonIntegralSkeleton as exc:
        rep.checks.append(Check("s(j,l) integral", False, {"error": str(exc)}))
    return rep


def cmd_congruence(args) -> Report:
    target = "A1" if args.target.lower() == "a1" else "p"
    step, m_values = partition.congruence_arguments(target, args.n, args.count)
    depth = max(args.precision, m_values[-1] + 1)
    res = partition.check_congruence(target, args.n, args.count, depth)
    rep = Report("congruence", {"target": target, "n": args.n, "count": args.count,
                                "depth": depth})
    for case in res.cases:
        details = {"m": case.m, "value": dec(case.value), "modulus": dec(res.modulus)}
        if case.quotient is not None:
            details["quotient"] = dec(case.quotient)
        rep.checks.append(Check(f"{target}({case.m}) = 0 mod {res.modulus}", case.passed,
                                details, depth))
    return rep


def cmd_a1(args) -> Report:
    m = args.m
    rep = Report("a1", {"m": m})
    series = partition.a1_series(max(args.precision, m + 1))[m]
    if m <= partition.BRUTE_FORCE_BOUND:
        prof = partition.a1_bruteforce(m)
        rep.data = {"R": {str(l): c for l, c in sorted(prof.counts.items())},
                    "A1": dec(prof.a1), "p": dec(prof.total)}
        rep.checks.append(Check("brute force = series", prof.a1 == series,
                                {"bruteforce": dec(prof.a1), "series": dec(series)}))
        rep.checks.append(Check("sum of R_l = p(m)", prof.total == partition.p_of(m),
                                {"p": dec(partition.p_of(m))}))
    else:
        rep.data = {"A1": dec(series)}
        rep.checks.append(Check("brute force = series", None,
                                {"reason": f"m above the enumeration bound {partition.BRUTE_FORCE_BOUND}"}))
    return rep


def cmd_eta_check(args) -> Report:
    e = etaquot.parse_eta(args.spec)
    rep = Report("eta-check", {"spec": e.spec_string()})
    nv = etaquot.newman_check(e)
    rep.checks.append(Check("Newman", nv.passed, {
        "weight_zero": nv.weight_zero, "sum_delta_r": nv.sum_delta_r,
        "sum_cofactor_r": nv.sum_cofactor_r, "product": dec(nv.product),
        "product_square": nv.product_square}))
    orders = etaquot.cusp_orders(e)
    rep.data["orders"] = {str(c): str(o) for c, o in orders.items()}
    rep.checks.append(Check("valence sum = 0", etaquot.valence_sum(e) == 0,
                            {"sum": str(etaquot.valence_sum(e))}))
    kv = etaquot.kinf_check(e)
    rep.checks.append(Check("poles only at infinity", kv.passed,
                            {"offending": [str(c) for c in kv.offending]}))
    try:
        lead = etaquot.expand(e, args.precision).valuation
        inf = next(c for c in orders if c.is_infinity)
        rep.checks.append(Check("order at infinity = leading exponent", orders[inf] == lead,
                                {"order": str(orders[inf]), "leading_exponent": lead}))
    except etaquot.FractionalLeadingPower as exc:
        rep.checks.append(Check("order at infinity = leading exponent", None, {"reason": str(exc)}))
    return rep


def cmd_theorem8(args) -> Report:
    n_max = 2 * args.n_max
    rep = Report("theorem8", {"n_max": args.n_max, "L_max": n_max})
    res = induction.theorem8_check(n_max)
    for ent in res.entries:
        window = (induction.series_window(ent.n, res.window)
                  if "series_iterate" in ent.cross_checks else None)
        rep.checks.append(Check(f"L_{ent.n}/5^{ent.claimed_power} in X^({ent.parity})",
                                ent.passed, ent.summary(), window))
    if args.dump_certificates:
        out = Path(args.dump_certificates)
        out.mkdir(parents=True, exist_ok=True)
        for ent in res.entries:
            if ent.certificate is None:
                continue
            body = {"n": ent.n, "pair": res.pairs[ent.n].to_json(), **ent.certificate.to_json()}
            (out / f"L{ent.n}.json").write_text(json.dumps(body, indent=1, sort_keys=True))
    return rep


def cmd_skeleton(args) -> Report:
    arrays = induction.skeleton_arrays(args.n_max)
    rep = Report("skeleton", {"n_max": args.n_max})
    for op, factor in (("U0", "1"), ("U0", "p0"), ("U1", "1"), ("U1", "p1")):
        table = induction.image_table(op, factor)
        window = [table[n] for n in range(-4, 1)]
        bad = []
        for n in range(1, args.n_max + 1):
            nxt = operators.pair_t_recursion(window)
            window = window[1:] + [nxt]
            if induction.skeleton_image(arrays, op, factor, n) != nxt:
                bad.append(n)
        inner = f"{factor}*t^n" if factor != "1" else "t^n"
        rep.checks.append(Check(f"arrays rebuild {op}{{{inner}}} for n=1..{args.n_max}",
                                not bad, {"mismatched_n": bad}))
    for name, arr in arrays.items():
        rep.checks.append(Check(f"{name}: support rule", not arr.support_violations,
                                {"violations": sorted(arr.support_violations),
                                 "negative_power_entries": sorted(arr.negative_power)}))
    if args.dump_certificates:
        out = Path(args.dump_certificates)
        out.mkdir(parents=True, exist_ok=True)
        (out / "skeleton.json").write_text(
            json.dumps({k: a.to_json() for k, a in arrays.items()}, indent=1, sort_keys=True))
    return rep


SERIES_NAMES = operators.NAMES + ("A1", "a", "p")


def cmd_series(args) -> Report:
    terms = args.terms
    if args.name == "A1":
        s = partition.a1_series(terms)
    elif args.name == "a":
        s = partition.a_series(terms)
    elif args.name == "p":
        s = partition.partition_series(terms)
    else:
        s = operators.named(args.name, terms)
    rep = Report("series", {"name": args.name, "terms": terms})
    rep.data = s.to_json()
    if args.name in operators.LEADING_EXPONENT:
        want = operators.LEADING_EXPONENT[args.name]
        rep.checks.append(Check("leading exponent", s.valuation == want,
                                {"expected": want, "found": s.valuation}))
    return rep


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _precision(text: str) -> int:
    value = int(text)
    if value < MIN_PRECISION:
        raise argparse.ArgumentTypeError(f"precision must be at least {MIN_PRECISION}")
    return value


def _common(env_default: int, suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults, so that a
    # flag given before the subcommand is not reset by the subparser
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=_precision, default=d(env_default),
                        help="series depth / comparison window (default 250 or $RRC_PRECISION)")
    common.add_argument("--json", metavar="PATH", default=d(None),
                        help="write the JSON report to PATH ('-' for stdout)")
    common.add_argument("--parallel", type=_bool, nargs="?", const=True, default=d(False),
                        help="fan independent checks out to worker processes")
    common.add_argument("--dump-certificates", metavar="DIR", default=d(None),
                        help="write certificates / arrays as JSON files into DIR")
    common.add_argument("--timing", action="store_true", default=d(False),
                        help="include elapsed_ms in the report (off keeps JSON reproducible)")
    return common


def build_parser() -> argparse.ArgumentParser:
    env = os.environ.get("RRC_PRECISION")
    env_default = _precision(env) if env else DEFAULT_DEPTH
    top = _common(env_default, suppress=False)
    common = _common(env_default, suppress=True)

    parser = argparse.ArgumentParser(prog="rrc", parents=[top],
                                     description="Congruences for Rogers-Ramanujan subpartitions: "
                                                 "series checks and 5-adic certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-relations", parents=[common],
                       help="check the twenty U-relations and the principal-part example")
    p.add_argument("--relations", metavar="PATH", help="alternative relation table (JSON)")
    p.set_defaults(func=cmd_verify_relations)

    p = sub.add_parser("verify-modeq", parents=[common], help="check the modular equation")
    p.set_defaults(func=cmd_verify_modeq)

    p = sub.add_parser("congruence", parents=[common],
                       help="check A_1(m) or p(m) = 0 mod 5^n along 24m = 1 mod 5^k")
    p.add_argument("--target", choices=["a1", "A1", "p"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("a1", parents=[common], help="R_l(m) table and A_1(m)")
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_a1)

    p = sub.add_parser("eta-check", parents=[common],
                       help='modularity and cusp orders of an eta quotient, e.g. "N=20; 2:-2 4:4 10:2 20:-4"')
    p.add_argument("spec")
    p.set_defaults(func=cmd_eta_check)

    p = sub.add_parser("theorem8", parents=[common],
                       help="certify L_1 .. L_{2 n_max} in the X spaces")
    p.add_argument("--n-max", type=int, default=3)
    p.set_defaults(func=cmd_theorem8)

    p = sub.add_parser("skeleton", parents=[common], help="build and check the skeleton arrays")
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("series", parents=[common], help="print a q-expansion")
    p.add_argument("name", choices=SERIES_NAMES)
    p.add_argument("--terms", type=int, default=20)
    p.set_defaults(func=cmd_series)
    return parser


def _print_text(rep: Report) -> None:
    print(f"{rep.command}: {'FAIL' if rep.failed else 'PASS'}")
    for c in rep.checks:
        extra = f" [window {c.window}]" if c.window is not None else ""
        print(f"  {c.status.upper():7s} {c.name}{extra}")
        if c.passed is False or c.name.startswith("Newman"):
            for k, v in c.details.items():
                print(f"          {k}: {v}")
    if rep.command == "series":
        terms = " + ".join(f"{c}*q^{e}" for e, c in rep.data["terms"])
        print(f"  {terms} + O(q^{rep.data['prec']})")
    elif rep.data:
        for k, v in rep.data.items():
            print(f"  {k}: {v}")


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"rrc: error: RRC_PRECISION: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"rrc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        rep.elapsed_ms = round(1000 * (time.perf_counter() - start))
    if args.json:
        text = json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text)
    if args.json != "-":
        _print_text(rep)
    return EXIT_FAIL if rep.failed else EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
