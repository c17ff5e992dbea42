"""Command-line front end.

Exit codes: 0 when the verdict is true (or the command simply succeeded), 1
when it is false, 2 on usage or input errors.  Every formula argument may be
given inline or as ``@path`` to read it from a file.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from . import analysis, pwl
from .formula import Schema, SupFam, expand_derived, family_nth, is_finitary, variables
from .proof import DEFAULT_K, check_proof_json
from .semantics import eval_sup
from .syntax import ParseError, format_formula, format_scalar, parse, to_json

_RATIONAL = re.compile(r"^\d+(/\d+)?$")


class UsageError(Exception):
    pass


def _text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            with open(arg[1:]) as fh:
                return fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _formula(arg: str, expand: bool = True):
    return parse(_text(arg), expand=expand)


def rational(text: str) -> Fraction:
    """``p/q`` or an integer; decimal literals are refused."""
    text = text.strip()
    if not _RATIONAL.match(text):
        raise UsageError(f"not a rational literal: {text!r} (use p/q)")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise UsageError(f"zero denominator in {text!r}") from None


def _grid(text: str) -> int:
    q = rational(text)
    if q <= 0 or q.numerator != 1:
        raise UsageError("--grid must have the form 1/k")
    return q.denominator


def _indices(text: str) -> list:
    out = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise UsageError("indices must be positive")
    return out


def _valuation(tokens: list) -> dict:
    """``x1=3/4 x2=1/2`` or positional ``3/4 1/2`` (comma separated also works)."""
    items = [t for tok in tokens for t in tok.split(",") if t]
    v = {}
    for pos, item in enumerate(items, start=1):
        if "=" in item:
            name, val = item.split("=", 1)
            if not re.match(r"^x\d+$", name.strip()):
                raise UsageError(f"bad variable name {name!r}")
            v[int(name.strip()[1:])] = rational(val)
        else:
            v[pos] = rational(item)
    for i, q in v.items():
        if not 0 <= q <= 1:
            raise UsageError(f"value of x{i} is outside [0, 1]")
    return v


def _point_text(p) -> str:
    return ", ".join(f"x{i}={format_scalar(Fraction(t))}" for i, t in enumerate(p, start=1))


def _point_json(p):
    return None if p is None else [format_scalar(Fraction(t)) for t in p]


def _dim(args, *fs) -> int:
    used = max((max(variables(expand_derived(f)), default=0) for f in fs), default=0)
    n = args.vars if args.vars is not None else max(used, 1)
    if n < used:
        raise UsageError(f"--vars {n} is below the largest variable index x{used}")
    return n


def _finitary(*fs):
    for f in fs:
        if not is_finitary(f):
            raise UsageError("this command needs a formula without countable disjunctions")


# -- subcommands -------------------------------------------------------------


def cmd_parse(args):
    f = _formula(args.formula, expand=args.expand)
    return 0, {"formula": format_formula(f), "ast": to_json(f)}, format_formula(f)


def cmd_eval(args):
    f = _formula(args.formula)
    v = _valuation(args.values)
    missing = sorted(variables(f) - set(v))
    if missing:
        raise UsageError("no value for " + ", ".join(f"x{i}" for i in missing))
    b = eval_sup(f, v, args.depth)
    data = {"lower": format_scalar(b.lower), "upper": format_scalar(b.upper), "exact": b.exact}
    if b.exact:
        return 0, data, format_scalar(b.lower)
    return 0, data, f"between {format_scalar(b.lower)} and {format_scalar(b.upper)} (not exact)"


def _decision(report, true_text, false_text, value_name="value"):
    data = {"verdict": report.verdict, "witness": _point_json(report.witness),
            "value": None if report.value is None else format_scalar(report.value)}
    if report.verdict:
        return 0, data, true_text
    return 1, data, f"{false_text} {_point_text(report.witness)}, {value_name} {format_scalar(report.value)}"


def cmd_taut(args):
    f = _formula(args.formula)
    _finitary(f)
    return _decision(pwl.is_tautology(f, _dim(args, f)), "tautology", "countermodel")


def cmd_equiv(args):
    f, g = _formula(args.left), _formula(args.right)
    _finitary(f, g)
    return _decision(pwl.are_equivalent(f, g, _dim(args, f, g)), "equivalent", "separated at", "distance")


def cmd_conseq(args):
    theory = [_formula(p) for p in args.premise]
    f = _formula(args.formula)
    _finitary(f, *theory)
    report = pwl.semantic_consequence(theory, f, _dim(args, f, *theory))
    return _decision(report, "consequence", "countermodel")


def cmd_dist(args):
    f, g = _formula(args.left), _formula(args.right)
    _finitary(f, g)
    n = _dim(args, f, g)
    d, w = pwl.sup_distance_witness(pwl.compile(f, n), pwl.compile(g, n))
    data = {"distance": format_scalar(d), "witness": _point_json(w)}
    return 0, data, f"{format_scalar(d)} at {_point_text(w)}"


def cmd_prove_check(args):
    try:
        with open(args.proof) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.proof}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.proof} is not valid JSON: {exc}") from None
    v = check_proof_json(data, K=args.template_K)
    out = {"ok": v.ok, "failed_step": v.failed_step, "reason": v.reason,
           "schema_sampled": v.schema_sampled, "K": args.template_K, "steps": v.report}
    lines = list(v.report)
    if v.ok:
        lines.append("accepted" + (f" (schema premises sampled for n = 1..{args.template_K})" if v.schema_sampled else ""))
    else:
        lines.append(f"rejected: {v.reason}")
    return (0 if v.ok else 1), out, "\n".join(lines)


def cmd_approx(args):
    f = _formula(args.formula)
    _finitary(f)
    if args.m < 1:
        raise UsageError("-m must be at least 1")
    n = _dim(args, f)
    func = analysis.CompiledPWL.of(f, n)
    approx = analysis.dyadic_simple_approx(func, args.m)
    den = _grid(args.grid)
    worst, worst_at = Fraction(0), None
    for p in pwl.grid_points(n, den):
        err = abs(approx.value(p) - func.value(p))
        if worst_at is None or err > worst:
            worst, worst_at = err, p
    bound = Fraction(1, 2**args.m)
    data = {"m": args.m, "grid": f"1/{den}", "max_error": format_scalar(worst),
            "witness": _point_json(worst_at), "bound": format_scalar(bound), "within_bound": worst <= bound}
    lines = [f"m={args.m} grid 1/{den}: max error {format_scalar(worst)} at {_point_text(worst_at)}, bound {format_scalar(bound)}"]
    if args.at:
        p = tuple(_valuation(args.at).get(i, Fraction(0)) for i in range(1, n + 1))
        val = approx.value(p)
        data["value_at"] = format_scalar(val)
        lines.append(f"f_{args.m}({_point_text(p)}) = {format_scalar(val)}")
    if args.show_sets:
        data["simple_function"] = approx.to_json()
    return (0 if worst <= bound else 1), data, "\n".join(lines)


def cmd_char_family(args):
    r = rational(args.r)
    try:
        fam = analysis.char_interval_family(r, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    members = [{"n": k, "formula": format_formula(family_nth(fam, k))} for k in _indices(args.indices)]
    data = {"r": format_scalar(r), "mode": args.mode, "family": format_formula(SupFam(fam)), "members": members}
    lines = [data["family"]] + [f"{m['n']}: {m['formula']}" for m in members]
    code = 0
    if args.at is not None:
        x = rational(args.at)
        res = analysis.pointwise_limit_detail(fam, [x], args.depth)
        b = res.bounds
        data["limit"] = {"x": format_scalar(x), "lower": format_scalar(b.lower), "upper": format_scalar(b.upper),
                         "exact": b.exact, "settled": res.settled}
        if b.exact:
            where = f" (members equal it from n={res.settled})" if res.settled is not None else ""
            lines.append(f"limit at x1={format_scalar(x)}: {format_scalar(b.lower)}{where}")
        else:
            lines.append(f"limit at x1={format_scalar(x)}: between {format_scalar(b.lower)} and {format_scalar(b.upper)}")
            code = 1
    return code, data, "\n".join(lines)


def cmd_limit_check(args):
    fam = _formula(args.family)
    target = _formula(args.target)
    if not (isinstance(fam, SupFam) and isinstance(fam.family, Schema)):
        raise UsageError("the family must be given as a schema V[...]")
    phis = fam.family
    idx = _indices(args.indices)
    n = _dim(args, target, *(family_nth(phis, k) for k in idx))
    members = [family_nth(phis, k) for k in idx]
    uni = analysis.uniform_limit_witness(members, target, n)
    data = {"indices": idx, "r": [format_scalar(r) for r in uni.r], "certified": uni.certified,
            "nondecreasing": uni.nondecreasing, "gap": format_scalar(uni.gap)}
    lines = [f"r_{k} = {format_scalar(r)}" + ("" if c else " (certificate fails)") for k, r, c in zip(idx, uni.r, uni.certified)]
    lines.append(f"nondecreasing: {'yes' if uni.nondecreasing else 'no'}; 1 - r_{idx[-1]} = {format_scalar(uni.gap)}")
    ok = uni.ok
    if args.witness:
        psi = _formula(args.witness)
        if not (isinstance(psi, SupFam) and isinstance(psi.family, Schema)):
            raise UsageError("the witness family must be given as a schema V[...]")
        den = _grid(args.grid)
        vals = [dict(enumerate(p, start=1)) for p in pwl.grid_points(n, den)]
        rep = analysis.order_limit_check(phis, target, psi.family, idx, vals, n, depth=args.depth)
        data["order_limit"] = {"ok": rep.ok, "rows": [r.to_json() for r in rep.rows]}
        lines.append(f"order limit: {'pass' if rep.ok else 'fail'} ({len(rep.rows)} checks)")
        for row in rep.failures:
            where = f" n={row.n}" if row.n is not None else ""
            lines.append(f"  failed{where}: {row.check} witness {row.to_json()['witness']}")
        ok = ok and rep.ok
    data["ok"] = ok
    return (0 if ok else 1), data, "\n".join(lines)


def cmd_good_seq(args):
    values = [rational(v) for v in args.values]
    seqs = [analysis.good_sequence(a) for a in values]
    data = {"sequences": [[format_scalar(e) for e in s.entries] for s in seqs]}
    lines = [str(s) if s.entries else "()" for s in seqs]
    code = 0
    if len(values) > 1:
        ok = analysis.good_sequence_sup_check(values)
        data["sup_check"] = ok
        lines.append(f"sup check: {'pass' if ok else 'fail'}")
        code = 0 if ok else 1
    return code, data, "\n".join(lines)


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="irlogic", description="Kernel for infinitary Riesz Lukasiewicz logic.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--vars", type=int, default=None, help="dimension n (default: largest variable index)")
    common.add_argument("--depth", type=int, default=8, help="members inspected per countable family")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("parse", parents=[common], help="parse and print a formula")
    p.add_argument("formula")
    p.add_argument("--expand", action="store_true", help="rewrite derived connectives first")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("eval", parents=[common], help="evaluate at a valuation, e.g. x1=3/4 x2=1/2")
    p.add_argument("formula")
    p.add_argument("values", nargs="*")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("taut", parents=[common], help="decide validity in [0,1]")
    p.add_argument("formula")
    p.set_defaults(run=cmd_taut)

    for name, fn, text in (("equiv", cmd_equiv, "decide semantic equivalence"), ("dist", cmd_dist, "sup-norm distance")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("left")
        p.add_argument("right")
        p.set_defaults(run=fn)

    p = sub.add_parser("conseq", parents=[common], help="decide semantic consequence from premises")
    p.add_argument("-p", "--premise", action="append", default=[])
    p.add_argument("formula")
    p.set_defaults(run=cmd_conseq)

    p = sub.add_parser("prove-check", parents=[common], help="check a proof given as JSON")
    p.add_argument("proof")
    p.add_argument("--template-K", dest="template_K", type=int, default=DEFAULT_K)
    p.set_defaults(run=cmd_prove_check)

    p = sub.add_parser("approx", parents=[common], help="dyadic simple-function approximation")
    p.add_argument("formula")
    p.add_argument("-m", type=int, default=2)
    p.add_argument("--grid", default="1/64")
    p.add_argument("--at", nargs="*", default=None)
    p.add_argument("--show-sets", action="store_true")
    p.set_defaults(run=cmd_approx)

    p = sub.add_parser("char-family", parents=[common], help="ramp family for a half-line indicator")
    p.add_argument("r")
    p.add_argument("--mode", choices=("ramp_above", "ramp_below"), default="ramp_above")
    p.add_argument("--indices", default="1..3")
    p.add_argument("--at", default=None, help="evaluate the limit at this x")
    p.set_defaults(run=cmd_char_family)

    p = sub.add_parser("limit-check", parents=[common], help="uniform and order limit witnesses")
    p.add_argument("family", help="schema V[...] listing phi_n")
    p.add_argument("target")
    p.add_argument("--witness", default=None, help="schema V[...] listing psi_n")
    p.add_argument("--indices", default="1..8")
    p.add_argument("--grid", default="1/8", help="valuations for the V psi_n = 1 check")
    p.set_defaults(run=cmd_limit_check)

    p = sub.add_parser("good-seq", parents=[common], help="good-sequence decomposition")
    p.add_argument("values", nargs="+")
    p.set_defaults(run=cmd_good_seq)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.depth < 1:
            raise UsageError("--depth must be at least 1")
        code, data, text = args.run(args)
    except (UsageError, ParseError, ValueError, TypeError) as exc:
        print(f"irlogic {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps({"command": args.command, "exit": code, "result": data}, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
