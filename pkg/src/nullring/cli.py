"""Command-line front end.

Every subcommand prints a JSON report ``{"status", "body", "timing"}`` to
stdout (or the body as CSV/text with ``--format``).  ``--out PATH`` also
writes the payload itself: element JSON for ``arith``, the certificate for
``certify``, CSV for ``boxcount``.

Exit codes: 0 pass, 1 verification failure, 2 usage/input/capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import dimension, expansion, ring, sumset
from .caps import env_caps, use_caps
from .errors import CapacityError, CertificationError, NullRingError

PASS, FAIL, ERROR = "pass", "fail", "error"
EXIT = {PASS: 0, FAIL: 1, ERROR: 2}


class UsageError(Exception):
    pass


@dataclass
class Report:
    status: str
    body: dict
    timing: float = 0.0
    csv: str | None = None
    text: str | None = None
    payload: str | None = None  # what --out writes

    def to_json(self) -> str:
        return json.dumps(
            {"status": self.status, "body": self.body, "timing": {"seconds": round(self.timing, 6)}},
            sort_keys=True,
        )

    def body_json(self) -> str:
        return json.dumps(self.body, sort_keys=True)


@dataclass
class CommandPlan:
    subcommand: str
    params: argparse.Namespace
    fmt: str = "json"
    out: Path | None = None
    caps: dict = field(default_factory=dict)


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational or decimal: {text!r}")


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--out", type=Path)
    p.add_argument("--cap-enumeration", type=positive_int)
    p.add_argument("--cap-sumset", type=positive_int)
    p.add_argument("--cap-refine", type=positive_int)
    return p


def _base_opts() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--radix", type=positive_int, default=2, help="base set {0} ∪ {radix^j}")
    p.add_argument("--base-elements", help="explicit finite base, comma separated")
    p.add_argument("--log-density-bound", type=rational)
    return p


VERIFY_FLAGS = {
    "density": {"n_max", "l_max"},
    "reps": {"n", "k_max"},
    "gaps": {"n", "b"},
    "closure": {"samples", "seed", "n_max", "t_max"},
    "cover": {"n", "t", "ell", "samples", "seed", "depth"},
}
VERIFY_REQUIRED = {
    "density": {"n_max", "l_max"},
    "reps": {"n", "k_max"},
    "gaps": {"n", "b"},
    "closure": {"samples", "seed"},
    "cover": {"n", "t", "ell", "samples", "seed"},
}


def build_parser() -> argparse.ArgumentParser:
    common, base = _common(), _base_opts()
    parser = _Parser(prog="nullring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("sumset", parents=[common, base], help="enumerate nS up to a limit")
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--limit", type=nonneg_int, required=True)

    p = sub.add_parser("verify", parents=[common, base], help="run a lemma verification sweep")
    p.add_argument("--lemma", choices=sorted(VERIFY_FLAGS), required=True)
    p.add_argument("--n-max", type=positive_int)
    p.add_argument("--l-max", type=positive_int)
    p.add_argument("--k-max", type=positive_int)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--t", type=positive_int)
    p.add_argument("--t-max", type=positive_int)
    p.add_argument("--b", type=positive_int)
    p.add_argument("--ell", type=positive_int)
    p.add_argument("--depth", type=positive_int)
    p.add_argument("--samples", type=positive_int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("arith", parents=[common], help="arithmetic on JSON elements")
    p.add_argument("--op", choices=["add", "sub", "neg", "mul", "value"], required=True)
    p.add_argument("--lhs", required=True, help="element JSON file or inline JSON")
    p.add_argument("--rhs")

    for name, helptext in [("expand", "certified binary digits"), ("runs", "equal-digit run witness")]:
        p = sub.add_parser(name, parents=[common, base], help=helptext)
        p.add_argument("--element", help="element JSON file or inline JSON")
        p.add_argument("--rule", help="stream rule: const<d>, cyclic:<d,d,...>, uniform")
        p.add_argument("--n", type=positive_int)
        p.add_argument("--t", type=positive_int)
        p.add_argument("--seed", type=int)
        p.add_argument("--max-refine", type=nonneg_int)
        if name == "expand":
            p.add_argument("--digits", type=positive_int)
            p.add_argument("--rational", type=_reduced_rational, help="p/q: period and membership verdict")
        else:
            p.add_argument("--len", type=positive_int, required=True, dest="length")

    p = sub.add_parser("certify", parents=[common, base], help="dimension cover certificate")
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--t", type=positive_int, required=True)
    p.add_argument("--s", type=rational, required=True)
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--l-cap", type=positive_int, default=1 << 20)

    p = sub.add_parser("boxcount", parents=[common, base], help="box counts of truncations (CSV)")
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--t", type=positive_int, required=True)
    p.add_argument("--jmax", type=positive_int, required=True)
    p.add_argument("--depth", type=nonneg_int, required=True)
    return parser


def _reduced_rational(text: str) -> tuple[int, int]:
    q = rational(text)
    return q.numerator, q.denominator


def parse(argv: list[str]) -> CommandPlan:
    ns = build_parser().parse_args(argv)
    if ns.subcommand == "verify":
        given = {k for k in set().union(*VERIFY_FLAGS.values()) if getattr(ns, k) is not None}
        extra = given - VERIFY_FLAGS[ns.lemma]
        if extra:
            flags = ", ".join("--" + k.replace("_", "-") for k in sorted(extra))
            raise UsageError(f"verify --lemma {ns.lemma} does not take {flags}")
        missing = VERIFY_REQUIRED[ns.lemma] - given
        if missing:
            flags = ", ".join("--" + k.replace("_", "-") for k in sorted(missing))
            raise UsageError(f"verify --lemma {ns.lemma} requires {flags}")
    if ns.subcommand in ("expand", "runs"):
        if ns.subcommand == "expand" and ns.rational is not None:
            if ns.element or ns.rule:
                raise UsageError("--rational cannot be combined with --element or --rule")
        else:
            if bool(ns.element) == bool(ns.rule):
                raise UsageError("give exactly one of --element or --rule")
            if ns.rule and (ns.n is None or ns.t is None):
                raise UsageError("--rule requires --n and --t")
            if ns.subcommand == "expand" and ns.digits is None:
                raise UsageError("expand requires --digits")
            if ns.rule and ns.rule.startswith("uniform") and ns.seed is None:
                raise UsageError("randomized rule 'uniform' requires --seed")
    if ns.subcommand == "arith":
        needs_rhs = ns.op in ("add", "sub", "mul")
        if needs_rhs != (ns.rhs is not None):
            raise UsageError(f"--op {ns.op} {'requires' if needs_rhs else 'does not take'} --rhs")
    caps = {
        "enumeration": ns.cap_enumeration,
        "sumset_limit": ns.cap_sumset,
        "refine_depth": ns.cap_refine,
    }
    return CommandPlan(ns.subcommand, ns, ns.format, ns.out, caps)


# -- helpers -----------------------------------------------------------------


def _load_json(arg: str):
    text = arg if arg.lstrip().startswith("{") else Path(arg).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON in {arg[:40]!r}: {exc}") from None


def _base(ns) -> sumset.BaseSet:
    bound = ns.log_density_bound
    if ns.base_elements:
        if bound is None:
            raise ValueError("--base-elements requires --log-density-bound")
        els = [int(x) for x in ns.base_elements.split(",") if x.strip()]
        return sumset.BaseSet.custom(els, bound)
    return sumset.BaseSet.powers(ns.radix, bound if bound is not None else 2)


def parse_rule(text: str, seed: int | None):
    text = text.strip()
    if text in ("uniform", "seeded-uniform"):
        return ring.SeededUniform(seed)
    if text.startswith("const"):
        return ring.Constant(int(text[5:].lstrip(":")))
    if text.startswith("cyclic:"):
        return ring.Cyclic(tuple(int(d) for d in text[7:].split(",")))
    raise ValueError(f"unknown rule {text!r}")


def _source(ns):
    if ns.element:
        return ring.element_from_json(_load_json(ns.element))
    base = _base(ns)
    return ring.DigitStream(ring.Profile(ns.n, ns.t, base), parse_rule(ns.rule, ns.seed))


def _status(report: sumset.VerificationReport) -> str:
    return PASS if report.passed else FAIL


# -- subcommands -------------------------------------------------------------


def _cmd_sumset(ns) -> Report:
    table = sumset.build_sumset(_base(ns), ns.n, ns.limit)
    els = table.elements.tolist()
    body = {"n": ns.n, "limit": ns.limit, "base": table.base.describe(), "count": len(els), "elements": els}
    csv = "k\n" + "".join(f"{k}\n" for k in els)
    return Report(PASS, body, csv=csv, text=" ".join(map(str, els)), payload=csv)


def _cmd_verify(ns) -> Report:
    lemma = ns.lemma
    if lemma == "density":
        rep = sumset.verify_density_bound(_base(ns), ns.n_max, ns.l_max)
    elif lemma == "reps":
        rep = sumset.verify_rep_bound(_base(ns), ns.n, ns.k_max)
    elif lemma == "gaps":
        base = _base(ns)
        w = sumset.find_gap(base, ns.n, ns.b)
        rep = sumset.VerificationReport(name="gaps", checked=w.k_next - w.k + 1)
        if not sumset.verify_gap(base, w):
            rep.fail(k=w.k, k_next=w.k_next)
        rep.stats = {"n": w.n, "b": w.threshold, "k": w.k, "k_next": w.k_next}
    elif lemma == "closure":
        rep = ring.verify_closure(ns.samples, ns.seed, n_max=ns.n_max or 3, t_max=ns.t_max or 5)
    else:
        rep = dimension.cover_check(ns.n, ns.t, ns.ell, ns.samples, ns.seed, depth=ns.depth, base=_base(ns))
    body = rep.to_dict()
    text = f"{lemma}: {'PASS' if rep.passed else 'FAIL'} ({rep.checked} checked)"
    return Report(_status(rep), body, text=text)


def _value_body(x: ring.RingElement) -> dict:
    v = ring.value_exact(x)
    return {"value": str(v), "numerator": v.numerator, "exponent": v.exponent}


def _cmd_arith(ns) -> Report:
    x = ring.element_from_json(_load_json(ns.lhs))
    if ns.op == "value":
        body = _value_body(x)
        return Report(PASS, body, text=body["value"], payload=json.dumps(body, sort_keys=True))
    if ns.op == "neg":
        result = ring.neg(x)
    else:
        y = ring.element_from_json(_load_json(ns.rhs))
        result = {"add": ring.add, "sub": ring.sub, "mul": ring.mul}[ns.op](x, y)
    elem = ring.element_to_json(result)
    body = {"element": elem, **_value_body(result)}
    return Report(PASS, body, text=body["value"], payload=json.dumps(elem, sort_keys=True))


def _cmd_expand(ns) -> Report:
    if ns.rational is not None:
        p, q = ns.rational
        verdict = expansion.membership_verdict(p, q)
        e = verdict.expansion
        body = {
            "p": p,
            "q": q,
            "integer_part": e.integer_part,
            "preperiod": e.preperiod,
            "period": e.period,
            "finite": e.finite,
            "max_run": e.max_run,
            "verdict": verdict.verdict,
            "embed": ring.element_to_json(verdict.embed) if verdict.embed else None,
            "required_run": verdict.required_run,
        }
        return Report(PASS, body, text=f"{e}  {verdict.verdict}")
    x = _source(ns)
    got = expansion.binary_digits(x, ns.digits, ns.max_refine)
    if isinstance(got, expansion.Indeterminate):
        body = {"indeterminate": True, "p": got.p, "ell": got.ell,
                "lower": str(got.lower), "upper": str(got.upper)}
        return Report(PASS, body, text=str(got))
    body = {"indeterminate": False, "integer_part": got.integer_part, "fraction": got.fraction,
            "expansion": str(got)}
    return Report(PASS, body, text=str(got))


def _cmd_runs(ns) -> Report:
    x = _source(ns)
    w = expansion.find_run(x, ns.length, ns.max_refine)
    ok = expansion.check_run(x, w, ns.max_refine)
    body = w.to_json()
    return Report(PASS if ok else FAIL, body, text=json.dumps(body), payload=json.dumps(body, sort_keys=True))


def _cmd_certify(ns) -> Report:
    cert = dimension.certify(ns.n, ns.t, ns.s, ns.eps, ns.l_cap, base=_base(ns))
    body = cert.to_json()
    return Report(PASS, body, text=f"ell={cert.ell} c_ell={cert.c_ell} bound<={body['hs_bound_upper']}",
                  payload=json.dumps(body, sort_keys=True))


def _cmd_boxcount(ns) -> Report:
    series = dimension.box_count(ns.n, ns.t, ns.jmax, ns.depth, base=_base(ns))
    csv = series.to_csv()
    return Report(PASS, series.to_json(), csv=csv, text=csv, payload=csv)


COMMANDS = {
    "sumset": _cmd_sumset,
    "verify": _cmd_verify,
    "arith": _cmd_arith,
    "expand": _cmd_expand,
    "runs": _cmd_runs,
    "certify": _cmd_certify,
    "boxcount": _cmd_boxcount,
}


def execute(plan: CommandPlan) -> Report:
    start = time.perf_counter()
    try:
        caps = env_caps().replace(**plan.caps)
        with use_caps(caps):
            report = COMMANDS[plan.subcommand](plan.params)
    except CertificationError as exc:
        report = Report(FAIL, {"error": str(exc), "kind": type(exc).__name__})
    except (CapacityError, NullRingError, ValueError, OSError) as exc:
        report = Report(ERROR, {"error": str(exc), "kind": type(exc).__name__})
    report.timing = time.perf_counter() - start
    return report


def render(report: Report, fmt: str) -> str:
    if fmt == "csv" and report.csv is not None and report.status != ERROR:
        return report.csv
    if fmt == "text" and report.text is not None:
        return f"[{report.status}] {report.text}\n"
    return report.to_json() + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT[ERROR]
    if plan.fmt == "csv" and plan.subcommand not in ("sumset", "boxcount"):
        print(f"nullring {plan.subcommand}: --format csv is not available", file=sys.stderr)
        return EXIT[ERROR]
    report = execute(plan)
    sys.stdout.write(render(report, plan.fmt))
    if plan.out is not None and report.status != ERROR:
        payload = report.payload if report.payload is not None else report.body_json()
        plan.out.write_text(payload if payload.endswith("\n") else payload + "\n", encoding="utf-8")
    return EXIT[report.status]


if __name__ == "__main__":
    sys.exit(main())
