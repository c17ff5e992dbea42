"""ASCII concrete syntax and JSON mirror of formulas.

Grammar (loosest to tightest)::

    f ::= f <-> f | f -> f | f \\/ f | f /\\ f | f (+) f | f (.) f | !f | atom
    atom ::= xN | 0 | 1 | ( f ) | nab(q, f) | del(q, f) | times(k, f) | dbl(k, f)
           | V{f; ...} | W{f; ...} | V[f; seq=...; mono=...] | W[...]

``->`` associates to the right, the other binary connectives to the left.
Scalars are ``p/q`` or ``0``/``1``; inside a schema template ``@s`` may stand
for a scalar and ``@n`` for a ``times``/``dbl`` count.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .formula import (
    INDEX_HOLE,
    SCALAR_HOLE,
    And,
    Bot,
    CountableFamily,
    Dbl,
    Delta,
    DyadicComplement,
    DyadicLevels,
    DyadicRampBelow,
    ExplicitEventuallyConstant,
    FiniteList,
    Formula,
    Iff,
    Imp,
    InfFam,
    Meta,
    Nabla,
    Neg,
    Odot,
    Oplus,
    Or,
    Schema,
    SeqDescriptor,
    SupFam,
    Times,
    Top,
    Var,
    expand_derived,
    free_holes,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|\(\+\)|\(\.\)|\\/|/\\)
  | (?P<var>x\d+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<hole>@[sn])
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[!(),;{}\[\]=])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


# binary operators: token -> (precedence, node class, right-associative)
_BINARY = {
    "<->": (1, Iff, False),
    "->": (2, Imp, True),
    "\\/": (3, Or, False),
    "/\\": (4, And, False),
    "(+)": (5, Oplus, False),
    "(.)": (6, Odot, False),
}
_PREFIX_PREC = 7


class _Parser:
    def __init__(self, text: str, allow_holes: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.allow_holes = allow_holes
        self.in_schema = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self) -> Formula:
        f = self.expr(0)
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def expr(self, min_prec: int) -> Formula:
        left = self.unary()
        while True:
            tok = self.peek()
            if tok[0] != "op" or tok[1] not in _BINARY:
                return left
            prec, cls, right_assoc = _BINARY[tok[1]]
            if prec < min_prec:
                return left
            self.next()
            right = self.expr(prec if right_assoc else prec + 1)
            left = cls(left, right)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok[1] == "!":
            self.next()
            return Neg(self.unary())
        return self.atom()

    def scalar(self):
        tok = self.next()
        if tok[0] == "hole" and tok[1] == "@s":
            self._check_hole(tok)
            return SCALAR_HOLE
        if tok[0] != "num":
            raise ParseError(f"expected a rational scalar, found {tok[1]!r}", tok[2])
        value = _rational(tok)
        if not 0 <= value <= 1:
            raise ParseError(f"scalar {tok[1]} out of [0,1]", tok[2])
        return value

    def count(self, minimum: int):
        tok = self.next()
        if tok[0] == "hole" and tok[1] == "@n":
            self._check_hole(tok)
            return INDEX_HOLE
        if tok[0] != "num" or "/" in tok[1] or int(tok[1]) < minimum:
            raise ParseError(f"expected an integer count >= {minimum}, found {tok[1]!r}", tok[2])
        return int(tok[1])

    def _check_hole(self, tok):
        if not (self.allow_holes or self.in_schema):
            raise ParseError(f"hole {tok[1]} outside a schema template", tok[2])

    def atom(self) -> Formula:
        tok = self.next()
        kind, value, pos = tok
        if kind == "var":
            if int(value[1:]) < 1:
                raise ParseError("variable indices start at 1", pos)
            return Var(int(value[1:]))
        if kind == "num":
            if value == "0":
                return Bot()
            if value == "1":
                return Top()
            raise ParseError(f"numeral {value!r} is not a formula", pos)
        if value == "(":
            f = self.expr(0)
            self.expect(")")
            return f
        if kind == "ident" and value in ("nab", "del"):
            self.expect("(")
            q = self.scalar()
            self.expect(",")
            f = self.expr(0)
            self.expect(")")
            return Nabla(q, f) if value == "nab" else Delta(q, f)
        if kind == "ident" and value in ("times", "dbl"):
            self.expect("(")
            k = self.count(1 if value == "times" else 0)
            self.expect(",")
            f = self.expr(0)
            self.expect(")")
            return Times(k, f) if value == "times" else Dbl(k, f)
        if kind == "ident" and value in ("V", "W"):
            node = SupFam if value == "V" else InfFam
            opener = self.next()
            if opener[1] == "{":
                members = [self.expr(0)]
                while self.peek()[1] == ";":
                    self.next()
                    members.append(self.expr(0))
                self.expect("}")
                return node(FiniteList(tuple(members)))
            if opener[1] == "[":
                return node(self.schema(pos))
            raise ParseError("expected '{' or '[' after family marker", opener[2])
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)

    def schema(self, pos: int) -> Schema:
        self.in_schema += 1
        template = self.expr(0)
        self.in_schema -= 1
        seq = None
        mono = "none"
        while self.peek()[1] == ";":
            self.next()
            key = self.next()
            self.expect("=")
            if key[1] == "seq":
                seq = self.seq()
            elif key[1] == "mono":
                tok = self.next()
                if tok[1] not in ("inc", "dec", "none"):
                    raise ParseError("malformed schema: mono must be inc, dec or none", tok[2])
                mono = tok[1]
            else:
                raise ParseError(f"malformed schema: unknown option {key[1]!r}", key[2])
        self.expect("]")
        try:
            return Schema(template, seq, mono)
        except ValueError as exc:
            raise ParseError(str(exc), pos) from None

    def seq(self) -> SeqDescriptor:
        tok = self.next()
        name = tok[1]
        try:
            if name == "complement":
                return DyadicComplement()
            if name == "ramp_below":
                self.expect("(")
                r = _rational(self.next())
                self.expect(")")
                return DyadicRampBelow(r)
            if name == "levels":
                self.expect("(")
                m = self.count(0)
                self.expect(")")
                return DyadicLevels(m)
            if name == "explicit":
                self.expect("(")
                prefix = []
                tail = None
                while True:
                    t = self.next()
                    if t[1] == "tail":
                        self.expect("=")
                        tail = _rational(self.next())
                        self.expect(")")
                        break
                    prefix.append(_rational(t))
                    self.expect(",")
                return ExplicitEventuallyConstant(tuple(prefix), tail)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed schema: {exc}", tok[2]) from None
        raise ParseError(f"malformed schema: unknown sequence {name!r}", tok[2])


def _rational(tok) -> Fraction:
    if tok[0] != "num":
        raise ParseError(f"expected a rational, found {tok[1]!r}", tok[2])
    try:
        return Fraction(tok[1])
    except ZeroDivisionError:
        raise ParseError("zero denominator", tok[2]) from None


def parse(text: str, expand: bool = True, allow_holes: bool = False) -> Formula:
    """Parse ``text``; with ``expand`` (default) sugar is rewritten to core nodes."""
    f = _Parser(text, allow_holes).parse()
    return expand_derived(f) if expand else f


def parse_template(text: str, expand: bool = True) -> Formula:
    """Parse a formula that may contain free ``@s``/``@n`` holes."""
    return parse(text, expand=expand, allow_holes=True)


# -- printing ---------------------------------------------------------------


def format_scalar(q) -> str:
    if q is SCALAR_HOLE or q is INDEX_HOLE:
        return repr(q)
    if isinstance(q, Fraction):
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return str(q)


def format_seq(seq: SeqDescriptor) -> str:
    if isinstance(seq, DyadicComplement):
        return "complement"
    if isinstance(seq, DyadicRampBelow):
        return f"ramp_below({format_scalar(seq.r)})"
    if isinstance(seq, DyadicLevels):
        return f"levels({seq.m})"
    if isinstance(seq, ExplicitEventuallyConstant):
        parts = [format_scalar(x) for x in seq.prefix] + [f"tail={format_scalar(seq.tail)}"]
        return f"explicit({', '.join(parts)})"
    raise TypeError(f"unknown sequence {seq!r}")


_PREC = {cls: (prec, right) for _, (prec, cls, right) in _BINARY.items()}
_SYMBOL = {cls: tok for tok, (_, cls, _) in _BINARY.items()}


def _family_text(marker: str, fam: CountableFamily) -> str:
    if isinstance(fam, FiniteList):
        return f"{marker}{{{'; '.join(format_formula(m) for m in fam.members)}}}"
    parts = [format_formula(fam.template)]
    if fam.seq is not None:
        parts.append(f"seq={format_seq(fam.seq)}")
    if fam.mono != "none":
        parts.append(f"mono={fam.mono}")
    return f"{marker}[{'; '.join(parts)}]"


def format_formula(f: Formula) -> str:
    """Minimal-parenthesis rendering that :func:`parse` reads back exactly."""
    return _fmt(f, 0)


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Var):
        return f"x{f.index}"
    if isinstance(f, Bot):
        return "0"
    if isinstance(f, Top):
        return "1"
    if isinstance(f, Meta):
        return f"?{f.name}"
    if isinstance(f, Neg):
        return "!" + _fmt(f.child, _PREFIX_PREC)
    if isinstance(f, (Nabla, Delta)):
        name = "nab" if isinstance(f, Nabla) else "del"
        return f"{name}({format_scalar(f.scalar)}, {_fmt(f.child, 0)})"
    if isinstance(f, (Times, Dbl)):
        name = "times" if isinstance(f, Times) else "dbl"
        return f"{name}({format_scalar(f.count)}, {_fmt(f.child, 0)})"
    if isinstance(f, SupFam):
        return _family_text("V", f.family)
    if isinstance(f, InfFam):
        return _family_text("W", f.family)
    prec, right_assoc = _PREC[type(f)]
    lp, rp = (prec + 1, prec) if right_assoc else (prec, prec + 1)
    text = f"{_fmt(f.left, lp)} {_SYMBOL[type(f)]} {_fmt(f.right, rp)}"
    return f"({text})" if prec < ctx else text


# -- JSON -------------------------------------------------------------------

_JSON_UNARY = {Neg: "neg"}
_JSON_BINARY = {Imp: "imp", Oplus: "oplus", Odot: "odot", Or: "or", And: "and", Iff: "iff"}
_JSON_BINARY_INV = {v: k for k, v in _JSON_BINARY.items()}


def seq_to_json(seq: SeqDescriptor) -> dict:
    if isinstance(seq, DyadicComplement):
        return {"kind": "complement"}
    if isinstance(seq, DyadicRampBelow):
        return {"kind": "ramp_below", "r": format_scalar(seq.r)}
    if isinstance(seq, DyadicLevels):
        return {"kind": "levels", "m": seq.m}
    if isinstance(seq, ExplicitEventuallyConstant):
        return {
            "kind": "explicit",
            "prefix": [format_scalar(x) for x in seq.prefix],
            "tail": format_scalar(seq.tail),
        }
    raise TypeError(f"unknown sequence {seq!r}")


def seq_from_json(data: dict) -> SeqDescriptor:
    kind = data["kind"]
    if kind == "complement":
        return DyadicComplement()
    if kind == "ramp_below":
        return DyadicRampBelow(Fraction(data["r"]))
    if kind == "levels":
        return DyadicLevels(int(data["m"]))
    if kind == "explicit":
        return ExplicitEventuallyConstant(tuple(Fraction(x) for x in data["prefix"]), Fraction(data["tail"]))
    raise ValueError(f"unknown sequence kind {kind!r}")


def family_to_json(fam: CountableFamily) -> dict:
    if isinstance(fam, FiniteList):
        return {"kind": "list", "members": [to_json(m) for m in fam.members]}
    out = {"kind": "schema", "template": to_json(fam.template), "mono": fam.mono}
    if fam.seq is not None:
        out["seq"] = seq_to_json(fam.seq)
    return out


def family_from_json(data: dict) -> CountableFamily:
    if data["kind"] == "list":
        return FiniteList(tuple(from_json(m) for m in data["members"]))
    if data["kind"] == "schema":
        seq = seq_from_json(data["seq"]) if "seq" in data else None
        return Schema(from_json(data["template"]), seq, data.get("mono", "none"))
    raise ValueError(f"unknown family kind {data['kind']!r}")


def _scalar_json(q):
    return "@s" if q is SCALAR_HOLE else format_scalar(q)


def _count_json(k):
    return "@n" if k is INDEX_HOLE else k


def to_json(f: Formula) -> dict:
    """One JSON object per node, tagged by ``"kind"``."""
    if isinstance(f, Var):
        return {"kind": "var", "index": f.index}
    if isinstance(f, Bot):
        return {"kind": "bot"}
    if isinstance(f, Top):
        return {"kind": "top"}
    if isinstance(f, Neg):
        return {"kind": "neg", "child": to_json(f.child)}
    if type(f) in _JSON_BINARY:
        return {"kind": _JSON_BINARY[type(f)], "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, (Nabla, Delta)):
        kind = "nabla" if isinstance(f, Nabla) else "delta"
        return {"kind": kind, "scalar": _scalar_json(f.scalar), "child": to_json(f.child)}
    if isinstance(f, (Times, Dbl)):
        kind = "times" if isinstance(f, Times) else "dbl"
        return {"kind": kind, "count": _count_json(f.count), "child": to_json(f.child)}
    if isinstance(f, (SupFam, InfFam)):
        kind = "sup" if isinstance(f, SupFam) else "inf"
        return {"kind": kind, "family": family_to_json(f.family)}
    raise TypeError(f"cannot serialize {f!r}")


def from_json(data: dict) -> Formula:
    kind = data["kind"]
    if kind == "var":
        return Var(int(data["index"]))
    if kind == "bot":
        return Bot()
    if kind == "top":
        return Top()
    if kind == "neg":
        return Neg(from_json(data["child"]))
    if kind in _JSON_BINARY_INV:
        return _JSON_BINARY_INV[kind](from_json(data["left"]), from_json(data["right"]))
    if kind in ("nabla", "delta"):
        raw = data["scalar"]
        q = SCALAR_HOLE if raw == "@s" else Fraction(raw)
        cls = Nabla if kind == "nabla" else Delta
        return cls(q, from_json(data["child"]))
    if kind in ("times", "dbl"):
        raw = data["count"]
        k = INDEX_HOLE if raw == "@n" else int(raw)
        cls = Times if kind == "times" else Dbl
        return cls(k, from_json(data["child"]))
    if kind in ("sup", "inf"):
        cls = SupFam if kind == "sup" else InfFam
        return cls(family_from_json(data["family"]))
    raise ValueError(f"unknown formula kind {kind!r}")


def check_closed(f: Formula) -> None:
    """Raise if ``f`` has holes not bound by a schema."""
    if free_holes(f):
        raise ValueError("formula has template holes outside a schema")
