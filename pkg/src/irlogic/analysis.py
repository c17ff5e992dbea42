"""Constructive analysis over the standard model.

Borel set descriptors, dyadic simple-function approximation, the ramp
families whose limits are indicator functions of half-lines, uniform and
order limit witnesses, and good sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .formula import (
    Delta,
    FiniteList,
    Formula,
    Iff,
    Imp,
    Schema,
    SupFam,
    Top,
    family_nth,
)
from .pwl import PWLFunc, are_equivalent, compile, is_tautology, pwl_eval, sup_distance
from .semantics import BoundsResult, as_valuation, eval, eval_sup, schema_closed_form, member_values
from .syntax import format_scalar, parse_template, seq_to_json, to_json

ONE = Fraction(1)
ZERO = Fraction(0)


# -- Borel set descriptors --------------------------------------------------


class BorelSetDesc:
    def contains(self, x: Sequence) -> bool:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, t) -> bool:
        above = t >= self.lo if self.lo_closed else t > self.lo
        below = t <= self.hi if self.hi_closed else t < self.hi
        return above and below

    def to_json(self):
        return {
            "lo": format_scalar(Fraction(self.lo)),
            "hi": format_scalar(Fraction(self.hi)),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


@dataclass(frozen=True)
class MultiInterval(BorelSetDesc):
    """Product of one interval per coordinate."""

    intervals: tuple

    def contains(self, x):
        return all(iv.contains(t) for iv, t in zip(self.intervals, x))

    def to_json(self):
        return {"kind": "multi_interval", "intervals": [iv.to_json() for iv in self.intervals]}


@dataclass(frozen=True)
class Complement(BorelSetDesc):
    child: BorelSetDesc

    def contains(self, x):
        return not self.child.contains(x)

    def to_json(self):
        return {"kind": "complement", "child": self.child.to_json()}


@dataclass(frozen=True)
class CountableUnion(BorelSetDesc):
    """Finite union of descriptors."""

    members: tuple

    def contains(self, x):
        return any(m.contains(x) for m in self.members)

    def to_json(self):
        return {"kind": "union", "members": [m.to_json() for m in self.members]}


@dataclass(frozen=True)
class IndexedUnion(BorelSetDesc):
    """Union over n of ``{x : lo <|<= x_coord <|<= s_n}`` for a catalog sequence s."""

    coord: int
    lo: Fraction
    lo_closed: bool
    seq: object
    hi_closed: bool = True

    def contains(self, x):
        t = x[self.coord]
        if not (t >= self.lo if self.lo_closed else t > self.lo):
            return False
        geo = self.seq.geometric()
        if geo is not None:
            limit, c = geo
            # s_n = limit - c 2^-n: exceeds t for some n iff t < limit (c > 0)
            if c == 0:
                return t <= limit if self.hi_closed else t < limit
            return t < limit
        n0, tail = self.seq.eventual()
        vals = [self.seq.value(n) for n in range(1, n0)] + [tail]
        return any(t <= s if self.hi_closed else t < s for s in vals)

    def to_json(self):
        return {
            "kind": "indexed_union",
            "coord": self.coord,
            "lo": format_scalar(Fraction(self.lo)),
            "lo_closed": self.lo_closed,
            "seq": seq_to_json(self.seq),
            "hi_closed": self.hi_closed,
        }


@dataclass(frozen=True)
class PolySlab(BorelSetDesc):
    """``{x in cell : lo <= f(x) < hi}`` (``<= hi`` when ``hi_closed``) for one affine piece."""

    cell: object
    affine: object
    lo: Fraction
    hi: Fraction
    hi_closed: bool

    def contains(self, x):
        if not self.cell.contains(x):
            return False
        v = self.affine(x)
        return self.lo <= v and (v <= self.hi if self.hi_closed else v < self.hi)

    def to_json(self):
        ineqs = [[format_scalar(Fraction(a)) for a in row] + [format_scalar(Fraction(b))] for row, b in self.cell.non_cube_constraints()]
        return {
            "kind": "poly_slab",
            "ineqs": ineqs,
            "affine": [format_scalar(c) for c in self.affine.coefficients] + [format_scalar(self.affine.constant)],
            "lo": format_scalar(self.lo),
            "hi": format_scalar(self.hi),
            "hi_closed": self.hi_closed,
        }


@dataclass(frozen=True)
class Preimage(BorelSetDesc):
    """Intensional ``f^-1([lo, hi))``: membership is decided by evaluating f."""

    func: "FuncDescriptor"
    lo: Fraction
    hi: Fraction
    hi_closed: bool

    def contains(self, x):
        v = self.func.value(x)
        return self.lo <= v and (v <= self.hi if self.hi_closed else v < self.hi)

    def to_json(self):
        return {
            "kind": "preimage",
            "func": self.func.describe(),
            "lo": format_scalar(self.lo),
            "hi": format_scalar(self.hi),
            "hi_closed": self.hi_closed,
        }


# -- function descriptors ---------------------------------------------------


class FuncDescriptor:
    dim: int

    def value(self, x) -> Fraction:
        raise NotImplementedError

    def describe(self) -> str:
        return type(self).__name__


@dataclass
class CompiledPWL(FuncDescriptor):
    func: PWLFunc
    label: str = "pwl"

    @property
    def dim(self):
        return self.func.dim

    def value(self, x):
        return pwl_eval(self.func, x)

    def describe(self):
        return self.label

    @classmethod
    def of(cls, f: Formula, n: int = 1) -> "CompiledPWL":
        return cls(compile(f, n), str(f))


@dataclass
class CharOfSet(FuncDescriptor):
    set: BorelSetDesc
    dim: int = 1

    def value(self, x):
        return ONE if self.set.contains(x) else ZERO

    def describe(self):
        return "char"


@dataclass
class PointwiseLimit(FuncDescriptor):
    """Limit of a monotone formula family, evaluated through its closed form."""

    family: Schema
    dim: int = 1

    def value(self, x):
        res = pointwise_limit_eval(self.family, x, depth=8)
        if not res.exact:
            raise ValueError(f"limit at {x} is not determined exactly")
        return res.lower

    def describe(self):
        return "limit"


# -- simple functions -------------------------------------------------------


@dataclass
class SimpleFunc:
    dim: int
    terms: list  # [(coefficient, BorelSetDesc)]

    def value(self, x) -> Fraction:
        x = tuple(Fraction(t) for t in x)
        return sum((c for c, s in self.terms if s.contains(x)), ZERO)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"coefficient": format_scalar(c), "set": s.to_json()} for c, s in self.terms],
        }


def _level_set(f: FuncDescriptor, lo, hi, hi_closed) -> BorelSetDesc:
    if isinstance(f, CompiledPWL):
        return CountableUnion(tuple(PolySlab(cell, m, lo, hi, hi_closed) for cell, m in f.func.pieces))
    return Preimage(f, lo, hi, hi_closed)


def dyadic_simple_approx(f: FuncDescriptor, m: int) -> SimpleFunc:
    """f_m = sum_k (k / 2^m) * char(E_k), E_k = f^-1([k/2^m, (k+1)/2^m)).

    The top level set is closed at 1 so that f_m(x) = 1 - 2^-m where f(x) = 1.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    top = 2**m
    terms = []
    for k in range(top):
        lo, hi = Fraction(k, top), Fraction(k + 1, top)
        terms.append((lo, _level_set(f, lo, hi, k == top - 1)))
    return SimpleFunc(f.dim, terms)


def dyadic_level(value: Fraction, m: int) -> Fraction:
    """Closed form of f_m at a point where f takes ``value``."""
    top = 2**m
    return Fraction(min(math.floor(value * top), top - 1), top)


# -- ramp families ----------------------------------------------------------


def char_interval_family(r, mode: str) -> Schema:
    """Formula family in x1 converging to an indicator of a half-line at ``r``.

    ``ramp_below``: member m is 0 up to r - r/2^m, affine up to 1 at r, then 1;
    decreasing, with infimum char([r, 1]).
    ``ramp_above``: member m is 0 up to r, affine up to 1 at r + (1-r)/2^m, then 1;
    increasing, with supremum char((r, 1]).
    """
    r = Fraction(r)
    if mode == "ramp_below":
        if not 0 < r <= 1:
            raise ValueError("ramp_below needs 0 < r <= 1")
        text = f"V[dbl(@n, times({r.denominator}, del(1/{r.numerator}, x1 (.) !del(@s, 1)))); seq=ramp_below({format_scalar(r)}); mono=dec]"
    elif mode == "ramp_above":
        if not 0 <= r < 1:
            raise ValueError("ramp_above needs 0 <= r < 1")
        w = 1 - r
        text = f"V[dbl(@n, times({w.denominator}, del(1/{w.numerator}, x1 (.) !del({format_scalar(r)}, 1)))); mono=inc]"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return parse_template(text, expand=False).family


def ramp_oracle(r: Fraction, m: int, x: Fraction, mode: str) -> Fraction:
    """Direct piecewise definition of the ramp members, for cross-checks."""
    if mode == "ramp_below":
        start = r - r / 2**m
        if x <= start:
            return ZERO
        return min(ONE, (x - start) / (r - start))
    if x <= r:
        return ZERO
    return min(ONE, (x - r) * 2**m / (1 - r))


@dataclass(frozen=True)
class LimitResult:
    bounds: BoundsResult
    settled: int | None  # first index from which members equal the limit


def pointwise_limit_eval(fam, p, depth: int, mode: str | None = None, closed_form: bool = True) -> BoundsResult:
    """Bounds on sup (``inc`` hint), inf (``dec``) or limit of member values at ``p``."""
    return pointwise_limit_detail(fam, p, depth, mode, closed_form).bounds


def pointwise_limit_detail(fam, p, depth: int, mode: str | None = None, closed_form: bool = True) -> LimitResult:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    v = as_valuation(p)
    if mode is None:
        mode = {"inc": "sup", "dec": "inf"}.get(getattr(fam, "mono", "none"), "limit")
    if isinstance(fam, FiniteList):
        vals = [eval(m, v) for m in fam.members] + [ZERO]
        val = {"sup": max(vals), "inf": min(vals), "limit": ZERO}[mode]
        return LimitResult(BoundsResult(val, val, True), len(fam.members) + 1)
    if closed_form:
        cf = schema_closed_form(fam, v, depth=depth)
        if cf is not None:
            val = {"sup": cf.sup, "inf": cf.inf, "limit": cf.limit}[mode]
            return LimitResult(BoundsResult(val, val, True), cf.settled)
    vals = member_values(fam, v, depth)
    if mode == "sup":
        lo, hi = max(vals), ONE
    elif mode == "inf":
        lo, hi = ZERO, min(vals)
    else:
        lo, hi = ZERO, ONE
    return LimitResult(BoundsResult(lo, hi, lo == hi), None)


# -- limits of formula families ---------------------------------------------


def eta(r: Fraction) -> Formula:
    """The constant-r formula del(r, 1)."""
    return Delta(Fraction(r), Top())


@dataclass
class UniformLimitReport:
    r: list
    certified: list
    nondecreasing: bool
    gap: Fraction

    @property
    def ok(self) -> bool:
        return all(self.certified)


def uniform_limit_witness(members: Sequence[Formula], target: Formula, n: int) -> UniformLimitReport:
    """r_k = 1 - sup distance between member k and the target, with certificates.

    Certificate k: del(r_k, 1) -> (member_k <-> target) is a tautology.
    """
    tgt = compile(target, n)
    rs, certs = [], []
    for f in members:
        r = 1 - sup_distance(compile(f, n), tgt)
        rs.append(r)
        certs.append(is_tautology(Imp(eta(r), Iff(f, target)), n).verdict)
    nondec = all(a <= b for a, b in zip(rs, rs[1:]))
    return UniformLimitReport(rs, certs, nondec, 1 - rs[-1] if rs else ONE)


@dataclass
class LimitRow:
    n: int | None
    check: str
    verdict: bool
    witness: object = None

    def to_json(self):
        w = self.witness
        if isinstance(w, tuple):
            w = [format_scalar(Fraction(t)) for t in w]
        elif isinstance(w, Fraction):
            w = format_scalar(w)
        return {"n": self.n, "check": self.check, "verdict": self.verdict, "witness": w}


@dataclass
class OrderLimitReport:
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.verdict for r in self.rows)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.verdict]


def order_limit_check(phis, target: Formula, psis, indices: Sequence[int], valuations: Sequence, n: int, depth: int = 8) -> OrderLimitReport:
    """Check target is the order limit of ``phis`` with witness family ``psis``.

    For each sampled index k: psi_k -> (target <-> phi_k) and psi_k -> psi_{k+1}
    are tautologies; at each sampled valuation V psi evaluates exactly to 1.
    """
    report = OrderLimitReport()
    for k in indices:
        phi_k, psi_k = family_nth(phis, k), family_nth(psis, k)
        d = is_tautology(Imp(psi_k, Iff(target, phi_k)), n)
        report.rows.append(LimitRow(k, "psi_n -> (phi <-> phi_n)", d.verdict, d.witness))
        d = is_tautology(Imp(psi_k, family_nth(psis, k + 1)), n)
        report.rows.append(LimitRow(k, "psi_n -> psi_n+1", d.verdict, d.witness))
    sup = SupFam(psis)
    for v in valuations:
        b = eval_sup(sup, v, depth)
        point = tuple(as_valuation(v)[i] for i in sorted(as_valuation(v)))
        report.rows.append(LimitRow(None, "V psi_n = 1", b.exact and b.lower == 1, point))
    return report


# -- good sequences ---------------------------------------------------------


@dataclass(frozen=True)
class GoodSequence:
    entries: tuple

    def __post_init__(self):
        for a, b in zip(self.entries, self.entries[1:]):
            if b > 0 and a != 1:
                raise ValueError("not a good sequence")

    @property
    def total(self) -> Fraction:
        return sum(self.entries, ZERO)

    def padded(self, length: int) -> tuple:
        return self.entries + (ZERO,) * (length - len(self.entries))

    def __str__(self):
        return ", ".join(format_scalar(e) for e in self.entries)


def good_sequence(a) -> GoodSequence:
    """b_i = min(1, max(0, a - (i - 1))), trailing zeros dropped."""
    if isinstance(a, float):
        raise TypeError("floats are not accepted")
    a = Fraction(a)
    if a < 0:
        raise ValueError("good sequences encode nonnegative values")
    count = math.ceil(a)
    return GoodSequence(tuple(min(ONE, a - i) for i in range(count)))


def good_sequence_sup_check(values: Sequence) -> bool:
    """Componentwise max of the good sequences equals the good sequence of the max."""
    if not values:
        raise ValueError("need at least one value")
    seqs = [good_sequence(v) for v in values]
    length = max(len(s.entries) for s in seqs)
    joined = tuple(max(col) for col in zip(*(s.padded(length) for s in seqs))) if length else ()
    return joined == good_sequence(max(Fraction(v) for v in values)).padded(length)
