"""Formula trees, countable families and derived connectives.

Core nodes are ``Var``, ``Bot``, ``Neg``, ``Imp``, ``Nabla`` and ``SupFam``.
Everything else (``Top``, ``Oplus``, ``Odot``, ``Or``, ``And``, ``Iff``,
``Delta``, ``InfFam``, ``Times``, ``Dbl``) is sugar that
:func:`expand_derived` rewrites into the core.

All nodes are immutable; subtrees may be shared, so anything that walks a
tree memoizes on ``id`` to stay linear on DAG-shaped formulas.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping


class Hole:
    """Placeholder inside a schema template: ``@s`` (scalar) or ``@n`` (index)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return f"@{self.name}"

    def __reduce__(self):
        return (_hole, (self.name,))


def _hole(name):
    return SCALAR_HOLE if name == "s" else INDEX_HOLE


SCALAR_HOLE = Hole("s")
INDEX_HOLE = Hole("n")


def as_rational01(value) -> Fraction:
    """Coerce ``value`` to a :class:`Fraction` and check it lies in [0, 1]."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use Fraction or 'p/q' strings")
    q = Fraction(value)
    if not 0 <= q <= 1:
        raise ValueError(f"scalar {q} is outside [0, 1]")
    return q


class Formula:
    __slots__ = ()

    def __str__(self):
        from .syntax import format_formula

        return format_formula(self)


# -- core -------------------------------------------------------------------


@dataclass(frozen=True, repr=False)
class Var(Formula):
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"variable index must be a positive integer, got {self.index!r}")

    def __repr__(self):
        return f"Var({self.index})"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True, repr=False)
class Neg(Formula):
    child: Formula

    def __repr__(self):
        return f"Neg({self.child!r})"


@dataclass(frozen=True, repr=False)
class Imp(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Imp({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Nabla(Formula):
    scalar: object  # Fraction, SCALAR_HOLE, or a scalar pattern in axiom schemas
    child: Formula

    def __repr__(self):
        return f"Nabla({self.scalar}, {self.child!r})"


@dataclass(frozen=True, repr=False)
class SupFam(Formula):
    family: "CountableFamily"

    def __repr__(self):
        return f"SupFam({self.family!r})"


# -- sugar ------------------------------------------------------------------


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True, repr=False)
class Oplus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Odot(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Delta(Formula):
    scalar: object
    child: Formula


@dataclass(frozen=True, repr=False)
class InfFam(Formula):
    family: "CountableFamily"


@dataclass(frozen=True, repr=False)
class Times(Formula):
    """``k``-fold truncated sum ``f (+) ... (+) f``, i.e. min(1, k*f)."""

    count: object  # int >= 1 or INDEX_HOLE
    child: Formula


@dataclass(frozen=True, repr=False)
class Dbl(Formula):
    """``k``-fold doubling, i.e. min(1, 2**k * f)."""

    count: object  # int >= 0 or INDEX_HOLE
    child: Formula


@dataclass(frozen=True, repr=False)
class Meta(Formula):
    """Formula metavariable, used by axiom patterns and lemma replay."""

    name: str

    def __repr__(self):
        return f"Meta({self.name!r})"


CORE_TYPES = (Var, Bot, Neg, Imp, Nabla, SupFam)
BINARY_SUGAR = (Oplus, Odot, Or, And, Iff)

for _cls in (Oplus, Odot, Or, And, Iff):
    _cls.__repr__ = lambda self: f"{type(self).__name__}({self.left!r}, {self.right!r})"
Delta.__repr__ = lambda self: f"Delta({self.scalar}, {self.child!r})"
InfFam.__repr__ = lambda self: f"InfFam({self.family!r})"
Times.__repr__ = lambda self: f"Times({self.count}, {self.child!r})"
Dbl.__repr__ = lambda self: f"Dbl({self.count}, {self.child!r})"


# -- sequences --------------------------------------------------------------


class SeqDescriptor:
    """Closed-form rational sequence s_1, s_2, ... with values in [0, 1]."""

    monotone = "none"

    def value(self, n: int) -> Fraction:
        raise NotImplementedError

    def geometric(self):
        """``(L, c)`` when s_n = L - c * 2**-n, else None."""
        return None

    def eventual(self):
        """``(N0, tail)`` when s_n = tail for all n >= N0, else None."""
        return None


@dataclass(frozen=True)
class DyadicComplement(SeqDescriptor):
    """s_n = 1 - 2**-n."""

    monotone = "inc"

    def value(self, n):
        return 1 - Fraction(1, 2**n)

    def geometric(self):
        return Fraction(1), Fraction(1)


@dataclass(frozen=True)
class DyadicRampBelow(SeqDescriptor):
    """s_n = r - r * 2**-n."""

    r: Fraction

    monotone = "inc"

    def __post_init__(self):
        object.__setattr__(self, "r", as_rational01(self.r))
        if self.r == 0:
            raise ValueError("ramp_below needs r > 0")

    def value(self, n):
        return self.r - self.r * Fraction(1, 2**n)

    def geometric(self):
        return self.r, self.r


@dataclass(frozen=True)
class DyadicLevels(SeqDescriptor):
    """s_n = min(n, 2**m) / 2**m."""

    m: int

    monotone = "inc"

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 0:
            raise ValueError("levels(m) needs an integer m >= 0")

    def value(self, n):
        return Fraction(min(n, 2**self.m), 2**self.m)

    def eventual(self):
        return 2**self.m, Fraction(1)


@dataclass(frozen=True)
class ExplicitEventuallyConstant(SeqDescriptor):
    prefix: tuple
    tail: Fraction

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(as_rational01(x) for x in self.prefix))
        object.__setattr__(self, "tail", as_rational01(self.tail))

    @property
    def monotone(self):
        vals = list(self.prefix) + [self.tail]
        pairs = list(zip(vals, vals[1:]))
        if all(a <= b for a, b in pairs):
            return "inc"
        if all(a >= b for a, b in pairs):
            return "dec"
        return "none"

    def value(self, n):
        return self.prefix[n - 1] if n <= len(self.prefix) else self.tail

    def eventual(self):
        return len(self.prefix) + 1, self.tail


# -- families ---------------------------------------------------------------


class CountableFamily:
    __slots__ = ()


@dataclass(frozen=True)
class FiniteList(CountableFamily):
    """Finite family, read as padded with infinitely many ``Bot``."""

    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a finite family must be nonempty")


MONOTONE_HINTS = ("inc", "dec", "none")


@dataclass(frozen=True)
class Schema(CountableFamily):
    """Indexed family: member n is ``template`` with ``@s := seq(n)``, ``@n := n``.

    ``mono`` states how the members are ordered as functions (``inc`` means
    member n is below member n+1 pointwise).
    """

    template: Formula
    seq: SeqDescriptor | None = None
    mono: str = "none"

    def __post_init__(self):
        if self.mono not in MONOTONE_HINTS:
            raise ValueError(f"monotone hint must be one of {MONOTONE_HINTS}")
        holes = template_holes(self.template)
        if not holes:
            raise ValueError("malformed schema: template has no @s or @n hole")
        if SCALAR_HOLE in holes and self.seq is None:
            raise ValueError("malformed schema: template uses @s but no seq is given")


def family_nth(fam: CountableFamily, n: int) -> Formula:
    """Member ``n`` (1-based) of a family; finite lists pad with ``Bot``."""
    if n < 1:
        raise ValueError("family members are indexed from 1")
    if isinstance(fam, FiniteList):
        return fam.members[n - 1] if n <= len(fam.members) else Bot()
    if isinstance(fam, Schema):
        s = fam.seq.value(n) if fam.seq is not None else None
        return fill_holes(fam.template, s, n)
    raise TypeError(f"not a family: {fam!r}")


# -- traversal helpers ------------------------------------------------------


def children(f: Formula) -> tuple:
    if isinstance(f, (Var, Bot, Top, Meta)):
        return ()
    if isinstance(f, (Neg, Nabla, Delta, Times, Dbl)):
        return (f.child,)
    if isinstance(f, (Imp,) + BINARY_SUGAR):
        return (f.left, f.right)
    if isinstance(f, (SupFam, InfFam)):
        fam = f.family
        return fam.members if isinstance(fam, FiniteList) else (fam.template,)
    raise TypeError(f"unknown node {f!r}")


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Each distinct node object once (pre-order)."""
    seen = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(reversed(children(node)))


def variables(f: Formula) -> frozenset:
    return frozenset(node.index for node in iter_nodes(f) if isinstance(node, Var))


def template_holes(f: Formula) -> frozenset:
    found = set()
    for node in iter_nodes(f):
        if isinstance(node, (Nabla, Delta)) and node.scalar is SCALAR_HOLE:
            found.add(SCALAR_HOLE)
        if isinstance(node, (Times, Dbl)) and node.count is INDEX_HOLE:
            found.add(INDEX_HOLE)
    return frozenset(found)


def free_holes(f: Formula) -> frozenset:
    """Holes that are not bound by an enclosing schema."""
    found = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Nabla, Delta)) and node.scalar is SCALAR_HOLE:
            found.add(SCALAR_HOLE)
        if isinstance(node, (Times, Dbl)) and node.count is INDEX_HOLE:
            found.add(INDEX_HOLE)
        if isinstance(node, (SupFam, InfFam)) and isinstance(node.family, Schema):
            continue
        stack.extend(children(node))
    return frozenset(found)


def is_finitary(f: Formula) -> bool:
    return not any(isinstance(node, (SupFam, InfFam)) for node in iter_nodes(f))


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max((depth(c) for c in kids), default=0)


def _rebuild(f: Formula, kids: list) -> Formula:
    if not kids:
        return f
    if isinstance(f, Neg):
        return Neg(kids[0])
    if isinstance(f, Nabla):
        return Nabla(f.scalar, kids[0])
    if isinstance(f, Delta):
        return Delta(f.scalar, kids[0])
    if isinstance(f, Times):
        return Times(f.count, kids[0])
    if isinstance(f, Dbl):
        return Dbl(f.count, kids[0])
    if isinstance(f, (Imp,) + BINARY_SUGAR):
        return type(f)(kids[0], kids[1])
    if isinstance(f, (SupFam, InfFam)):
        fam = f.family
        if isinstance(fam, FiniteList):
            return type(f)(FiniteList(tuple(kids)))
        return type(f)(Schema(kids[0], fam.seq, fam.mono))
    raise TypeError(f"unknown node {f!r}")


def transform(f: Formula, fn: Callable[[Formula, list], Formula | None]) -> Formula:
    """Bottom-up rewrite preserving sharing.

    ``fn(node, new_children)`` returns a replacement or None to rebuild the
    node from its rewritten children.
    """
    memo: dict = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key][1]
        kids = [go(c) for c in children(node)]
        out = fn(node, kids)
        if out is None:
            same = all(a is b for a, b in zip(kids, children(node)))
            out = node if same else _rebuild(node, kids)
        memo[key] = (node, out)
        return out

    return go(f)


# -- operations -------------------------------------------------------------


def _oplus(a, b):
    return Imp(Neg(a), b)


def _odot(a, b):
    return Neg(Imp(a, Neg(b)))


def _or(a, b):
    return Imp(Imp(a, b), b)


def expand_derived(f: Formula) -> Formula:
    """Rewrite sugar into ``Var/Bot/Neg/Imp/Nabla/SupFam``.

    Index holes of schema templates survive as ``Dbl(@n, .)`` or
    ``Times(@n, .)``; they are expanded once a member is instantiated.
    """

    def rule(node, kids):
        if isinstance(node, Top):
            return Neg(Bot())
        if isinstance(node, Oplus):
            return _oplus(*kids)
        if isinstance(node, Odot):
            return _odot(*kids)
        if isinstance(node, Or):
            return _or(*kids)
        if isinstance(node, And):
            a, b = kids
            return Neg(_or(Neg(a), Neg(b)))
        if isinstance(node, Iff):
            a, b = kids
            return _odot(Imp(a, b), Imp(b, a))
        if isinstance(node, Delta):
            return Neg(Nabla(node.scalar, Neg(kids[0])))
        if isinstance(node, InfFam):
            fam = node.family
            if isinstance(fam, FiniteList):
                return Neg(SupFam(FiniteList(tuple(Neg(k) for k in kids))))
            return Neg(SupFam(Schema(Neg(kids[0]), fam.seq, fam.mono)))
        if isinstance(node, Times) and node.count is not INDEX_HOLE:
            (child,) = kids
            acc = child
            for _ in range(node.count - 1):
                acc = _oplus(acc, child)
            return acc
        if isinstance(node, Dbl) and node.count is not INDEX_HOLE:
            acc = kids[0]
            for _ in range(node.count):
                acc = _oplus(acc, acc)
            return acc
        return None

    return transform(f, rule)


def fill_holes(f: Formula, s: Fraction | None, n: int | None) -> Formula:
    """Replace ``@s`` by ``s`` and ``@n`` by ``n``; nested schemas keep theirs."""

    memo: dict = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key][1]
        if isinstance(node, (SupFam, InfFam)) and isinstance(node.family, Schema):
            out = node
        else:
            kids = [go(c) for c in children(node)]
            if isinstance(node, (Nabla, Delta)) and node.scalar is SCALAR_HOLE:
                if s is None:
                    raise ValueError("scalar hole without a value")
                out = type(node)(s, kids[0])
            elif isinstance(node, (Times, Dbl)) and node.count is INDEX_HOLE:
                if n is None:
                    raise ValueError("index hole without a value")
                out = type(node)(n, kids[0])
            elif all(a is b for a, b in zip(kids, children(node))):
                out = node
            else:
                out = _rebuild(node, kids)
        memo[key] = (node, out)
        return out

    return go(f)


def subst(f: Formula, mapping: Mapping[int, Formula]) -> Formula:
    """Simultaneous substitution of formulas for variables."""

    def rule(node, kids):
        if isinstance(node, Var) and node.index in mapping:
            return mapping[node.index]
        return None

    return transform(f, rule)



class _Interner:
    """Maps structurally equal formulas to the same integer, in linear time."""

    def __init__(self):
        self.table: dict = {}
        self.live: dict = {}  # id -> (node, key); keeps nodes alive so ids stay valid

    def key(self, f) -> int:
        stack = [(f, False)]
        while stack:
            node, ready = stack.pop()
            if id(node) in self.live:
                continue
            kids = _intern_children(node)
            if not ready:
                stack.append((node, True))
                stack.extend((k, False) for k in kids if id(k) not in self.live)
                continue
            sig = (type(node).__name__, _intern_label(node)) + tuple(self.live[id(k)][1] for k in kids)
            k = self.table.setdefault(sig, len(self.table))
            self.live[id(node)] = (node, k)
        return self.live[id(f)][1]


def _intern_children(node):
    if isinstance(node, Formula):
        return children(node)
    return ()


def _intern_label(node):
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Meta):
        return node.name
    if isinstance(node, (Nabla, Delta)):
        return ("s", repr(node.scalar)) if not isinstance(node.scalar, Fraction) else node.scalar
    if isinstance(node, (Times, Dbl)):
        return repr(node.count)
    if isinstance(node, (SupFam, InfFam)):
        fam = node.family
        if isinstance(fam, FiniteList):
            return ("list", len(fam.members))
        return ("schema", fam.seq, fam.mono)
    return None


_INTERNER = _Interner()


def struct_key(f: Formula) -> int:
    """Integer that is equal for exactly the structurally equal formulas."""
    return _INTERNER.key(f)


def same(a: Formula, b: Formula) -> bool:
    return a is b or struct_key(a) == struct_key(b)
