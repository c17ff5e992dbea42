"""Exact evaluation in the standard algebra [0, 1].

``eval`` handles finitary formulas (finite-list disjunctions are allowed, they
are plain maxima).  ``eval_sup`` also accepts schematic disjunctions and
returns two-sided bounds; when the member values along the schema admit a
closed form the bounds collapse to the exact supremum.

Closed forms: for a fixed valuation every catalog sequence is, from some index
on, a polynomial in t = 2**-n.  That shape survives negation, implication,
scalars (fixed or ``@s``), finite maxima and the index-dependent ``dbl(@n, .)``
and ``times(@n, .)``, because each truncation ``min(1, .)`` settles on one side
after a computable index.  Sup, inf and limit of such a sequence are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .formula import (
    INDEX_HOLE,
    SCALAR_HOLE,
    Bot,
    Dbl,
    FiniteList,
    Formula,
    Imp,
    Nabla,
    Neg,
    Schema,
    SupFam,
    Times,
    Var,
    as_rational01,
    expand_derived,
    family_nth,
    free_holes,
)

ONE = Fraction(1)
ZERO = Fraction(0)


class UnboundVariable(KeyError):
    pass


@dataclass(frozen=True)
class BoundsResult:
    lower: Fraction
    upper: Fraction
    exact: bool

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound above upper bound")


def as_valuation(v) -> dict:
    """Normalize a mapping ``{index: value}`` or a sequence ``(x1, x2, ...)``."""
    if isinstance(v, Mapping):
        items = v.items()
    else:
        items = enumerate(v, start=1)
    return {int(i): as_rational01(x) for i, x in items}


def _imp(a, b):
    return min(ONE, 1 - a + b)


def _nabla(alpha, x):
    return 1 - alpha * (1 - x)


def _lookup(v, i):
    try:
        return v[i]
    except KeyError:
        raise UnboundVariable(f"unbound variable x{i}") from None


def eval(f: Formula, v) -> Fraction:
    """Value of a finitary formula at valuation ``v``."""
    return evaluator(f)(v)


def evaluator(f: Formula):
    """Expand ``f`` once and return ``v -> value``; for repeated evaluation."""
    g = expand_derived(f)
    if free_holes(g):
        raise ValueError("cannot evaluate a formula with template holes")
    return lambda v: _eval_core(g, as_valuation(v))


def _eval_core(g: Formula, v: dict) -> Fraction:
    memo: dict = {}

    def go(node):
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(node, Var):
            out = _lookup(v, node.index)
        elif isinstance(node, Bot):
            out = ZERO
        elif isinstance(node, Neg):
            out = 1 - go(node.child)
        elif isinstance(node, Imp):
            out = _imp(go(node.left), go(node.right))
        elif isinstance(node, Nabla):
            out = _nabla(node.scalar, go(node.child))
        elif isinstance(node, SupFam):
            if not isinstance(node.family, FiniteList):
                raise ValueError("schematic disjunction: use eval_sup")
            out = max(go(m) for m in node.family.members)
        else:
            raise TypeError(f"not a core node: {node!r}")
        memo[key] = (node, out)
        return out

    return go(g)


def eval_sup(f: Formula, v, depth: int, closed_form: bool = True) -> BoundsResult:
    """Bounds on the value of a formula that may contain schematic disjunctions.

    Each schema contributes ``max`` of its first ``depth`` members as lower
    bound and 1 as upper bound, unless ``closed_form`` finds the exact value.
    The lower bound never decreases as ``depth`` grows.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    v = as_valuation(v)
    g = expand_derived(f)
    lo, hi = _bounds(g, v, depth, closed_form, {})
    return BoundsResult(lo, hi, lo == hi)


def _bounds(g: Formula, v: dict, depth: int, closed_form: bool, memo: dict):
    def go(node):
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(node, Var):
            x = _lookup(v, node.index)
            out = (x, x)
        elif isinstance(node, Bot):
            out = (ZERO, ZERO)
        elif isinstance(node, Neg):
            lo, hi = go(node.child)
            out = (1 - hi, 1 - lo)
        elif isinstance(node, Imp):
            alo, ahi = go(node.left)
            blo, bhi = go(node.right)
            out = (_imp(ahi, blo), _imp(alo, bhi))
        elif isinstance(node, Nabla):
            lo, hi = go(node.child)
            out = (_nabla(node.scalar, lo), _nabla(node.scalar, hi))
        elif isinstance(node, SupFam):
            fam = node.family
            if isinstance(fam, FiniteList):
                parts = [go(m) for m in fam.members]
                out = (max(p[0] for p in parts), max(p[1] for p in parts))
            else:
                out = None
                if closed_form:
                    cf = schema_closed_form(fam, v, depth=depth)
                    if cf is not None:
                        out = (cf.sup, cf.sup)
                if out is None:
                    lo = ZERO
                    for n in range(1, depth + 1):
                        member = expand_derived(family_nth(fam, n))
                        lo = max(lo, _bounds(member, v, depth, closed_form, {})[0])
                    out = (lo, ONE)
        else:
            raise TypeError(f"not a core node: {node!r}")
        memo[key] = (node, out)
        return out

    return go(g)


def check_axiom_soundness(axiom_id: str, substitution: Mapping, v, scalars: Mapping | None = None, k=None) -> bool:
    """Whether the instantiated axiom takes value 1 at ``v``."""
    from .axioms import instantiate

    inst = instantiate(axiom_id, substitution, scalars or {}, k)
    return eval(inst, v) == ONE


# -- closed forms for schemas -----------------------------------------------


class NoClosedForm(Exception):
    pass


def _poly_at(coeffs, n):
    t = Fraction(1, 2**n)
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _settle_index(coeffs, start: int):
    """First index ``N >= start`` after which sign(P(2**-n)) is constant.

    Returns ``(N, sign)`` with sign in {-1, 0, 1}.
    """
    nz = [j for j, c in enumerate(coeffs) if c != 0]
    if not nz:
        return start, 0
    k = nz[0]
    lead = abs(coeffs[k])
    rest = sum(abs(c) for c in coeffs[k + 1 :])
    n = max(start, 1)
    # |lead| t^k dominates once t * rest < |lead| (t <= 1/2 throughout)
    while rest and Fraction(rest, 2**n) >= lead:
        n += 1
    return n, (1 if coeffs[k] > 0 else -1)


@dataclass(frozen=True)
class _Seq:
    """w_n = prefix[n-1] for n < start, P(2**-n) for n >= start."""

    prefix: tuple
    coeffs: tuple

    @property
    def start(self):
        return len(self.prefix) + 1

    def at(self, n):
        return self.prefix[n - 1] if n < self.start else _poly_at(self.coeffs, n)

    def extended(self, start):
        if start <= self.start:
            return self
        extra = tuple(_poly_at(self.coeffs, n) for n in range(self.start, start))
        return _Seq(self.prefix + extra, self.coeffs)


def _const(c):
    return _Seq((), (c,))


def _align(a: _Seq, b: _Seq):
    s = max(a.start, b.start)
    return a.extended(s), b.extended(s)


def _padd(p, q):
    m = max(len(p), len(q))
    p = tuple(p) + (ZERO,) * (m - len(p))
    q = tuple(q) + (ZERO,) * (m - len(q))
    return _trim(x + y for x, y in zip(p, q))


def _pscale(p, c, shift=ZERO):
    out = [c * x for x in p]
    out[0] += shift
    return _trim(out)


def _pmul(p, q):
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return _trim(out)


def _affine(a: _Seq, c, shift) -> _Seq:
    return _Seq(tuple(c * x + shift for x in a.prefix), _pscale(a.coeffs, c, shift))


def _min_one(a: _Seq) -> _Seq:
    diff = _pscale(a.coeffs, ONE, -ONE)
    n, sign = _settle_index(diff, a.start)
    a = a.extended(n)
    prefix = tuple(min(ONE, x) for x in a.prefix)
    return _Seq(prefix, (ONE,) if sign >= 0 else a.coeffs)


def _seq_imp(a: _Seq, b: _Seq) -> _Seq:
    a, b = _align(a, b)
    raw = _Seq(
        tuple(1 - x + y for x, y in zip(a.prefix, b.prefix)),
        _padd(_pscale(a.coeffs, -ONE, ONE), b.coeffs),
    )
    return _min_one(raw)


def _seq_mul(a: _Seq, b: _Seq) -> _Seq:
    a, b = _align(a, b)
    return _Seq(tuple(x * y for x, y in zip(a.prefix, b.prefix)), _pmul(a.coeffs, b.coeffs))


def _seq_max(a: _Seq, b: _Seq) -> _Seq:
    a, b = _align(a, b)
    n, sign = _settle_index(_padd(a.coeffs, _pscale(b.coeffs, -ONE)), a.start)
    a, b = a.extended(n), b.extended(n)
    prefix = tuple(max(x, y) for x, y in zip(a.prefix, b.prefix))
    return _Seq(prefix, a.coeffs if sign >= 0 else b.coeffs)


def _seq_dbl(a: _Seq) -> _Seq:
    """n -> min(1, 2**n * w_n)."""
    a0, rest = a.coeffs[0], a.coeffs[1:]
    if a0 == 0:
        shifted = _Seq(tuple(x * 2**n for n, x in enumerate(a.prefix, start=1)), _trim(rest or (ZERO,)))
        return _min_one(shifted)
    bound = 1 + sum(abs(c) for c in rest)
    n = a.start
    while a0 * 2**n < bound:
        n += 1
    a = a.extended(n)
    return _Seq(tuple(min(ONE, x * 2**i) for i, x in enumerate(a.prefix, start=1)), (ONE,))


def _seq_times(a: _Seq) -> _Seq:
    """n -> min(1, n * w_n)."""
    a0, rest = a.coeffs[0], a.coeffs[1:]
    if a0 == 0:
        if any(rest):
            raise NoClosedForm("n * w_n with w_n -> 0 geometrically")
        return _Seq(tuple(min(ONE, x * i) for i, x in enumerate(a.prefix, start=1)), (ZERO,))
    # n * t^j <= 1/2 for n >= 1, j >= 1
    bound = (1 + sum(abs(c) for c in rest) / 2) / a0
    n = max(a.start, -(-bound.numerator // bound.denominator))
    a = a.extended(n)
    return _Seq(tuple(min(ONE, x * i) for i, x in enumerate(a.prefix, start=1)), (ONE,))


def _seq_of_descriptor(seq) -> _Seq:
    geo = seq.geometric()
    if geo is not None:
        limit, c = geo
        return _Seq((), _trim((limit, -c)))
    ev = seq.eventual()
    if ev is not None:
        n0, tail = ev
        return _Seq(tuple(seq.value(n) for n in range(1, n0)), (tail,))
    raise NoClosedForm(f"sequence {seq!r} has no closed form")


@dataclass(frozen=True)
class ClosedForm:
    sup: Fraction
    inf: Fraction
    limit: Fraction
    settled: int | None  # first n with w_m = limit for every m >= n; None if never


def _summarize(a: _Seq) -> ClosedForm:
    limit = a.coeffs[0]
    n, sign = _settle_index((ZERO,) + a.coeffs[1:], a.start)
    a = a.extended(n)
    vals = list(a.prefix)
    if sign == 0:
        off = [i for i, x in enumerate(vals, start=1) if x != limit]
        settled = off[-1] + 1 if off else 1
        vals.append(limit)
        return ClosedForm(max(vals), min(vals), limit, settled)
    # strictly on one side of the limit from n on; scan until far terms can't beat the first
    first = _poly_at(a.coeffs, n)
    gap = abs(first - limit)
    spread = sum(abs(c) for c in a.coeffs[1:])
    window = [first]
    m = n + 1
    while Fraction(spread, 2**m) > gap:
        window.append(_poly_at(a.coeffs, m))
        m += 1
    if sign > 0:
        return ClosedForm(max(vals + window), min(vals + [limit]), limit, None)
    return ClosedForm(max(vals + [limit]), min(vals + window), limit, None)


def schema_closed_form(fam: Schema, v, depth: int = 8) -> ClosedForm | None:
    """Exact sup/inf/limit of the member values at ``v``, or None."""
    v = as_valuation(v)
    try:
        seq = _seq_of_descriptor(fam.seq) if fam.seq is not None else None
        template = expand_derived(fam.template)
        return _summarize(_profile(template, v, seq, depth))
    except NoClosedForm:
        return None


def _profile(template: Formula, v: dict, seq: _Seq | None, depth: int) -> _Seq:
    memo: dict = {}

    def holed(node):
        return bool(free_holes(node))

    def go(node):
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if not holed(node):
            b = _bounds(node, v, depth, True, {})
            if b[0] != b[1]:
                raise NoClosedForm("inner disjunction without exact value")
            out = _const(b[0])
        elif isinstance(node, Neg):
            out = _affine(go(node.child), -ONE, ONE)
        elif isinstance(node, Imp):
            out = _seq_imp(go(node.left), go(node.right))
        elif isinstance(node, Nabla):
            child = go(node.child)
            # 1 - s (1 - w)
            if node.scalar is SCALAR_HOLE:
                prod = _seq_mul(seq, _affine(child, -ONE, ONE))
            else:
                prod = _affine(child, -node.scalar, node.scalar)
            out = _affine(prod, -ONE, ONE)
        elif isinstance(node, Dbl) and node.count is INDEX_HOLE:
            out = _seq_dbl(go(node.child))
        elif isinstance(node, Times) and node.count is INDEX_HOLE:
            out = _seq_times(go(node.child))
        elif isinstance(node, SupFam) and isinstance(node.family, FiniteList):
            parts = [go(m) for m in node.family.members]
            out = parts[0]
            for p in parts[1:]:
                out = _seq_max(out, p)
        else:
            raise NoClosedForm(f"no closed form through {type(node).__name__}")
        memo[key] = (node, out)
        return out

    return go(template)


def member_values(fam: Schema, v, count: int) -> list:
    """Exact values of the first ``count`` members at ``v`` (members must be finitary)."""
    v = as_valuation(v)
    return [_eval_core(expand_derived(family_nth(fam, n)), v) for n in range(1, count + 1)]
