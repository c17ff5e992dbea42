"""Axiom schemas, first-order unification and axiom recognition.

Formula metavariables are :class:`~irlogic.formula.Meta` nodes; scalar
metavariables are :class:`SMeta` objects placed in ``Nabla.scalar``.  All
patterns are stored with ``<->`` already expanded, so recognition is plain
first-order matching followed by the scalar side conditions of R2 and R3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .formula import (
    Bot,
    Dbl,
    FiniteList,
    Formula,
    Iff,
    Imp,
    Meta,
    Nabla,
    Neg,
    Schema,
    SupFam,
    Times,
    Var,
    _rebuild,
    as_rational01,
    children,
    expand_derived,
    family_nth,
    same,
)


@dataclass(frozen=True)
class SMeta:
    """Scalar metavariable."""

    name: str

    def __repr__(self):
        return f"?{self.name}"


PHI, PSI, CHI = Meta("phi"), Meta("psi"), Meta("chi")
ALPHA, BETA, GAMMA = SMeta("alpha"), SMeta("beta"), SMeta("gamma")

_RAW = {
    "L1": Imp(PHI, Imp(PSI, PHI)),
    "L2": Imp(Imp(PHI, PSI), Imp(Imp(PSI, CHI), Imp(PHI, CHI))),
    "L3": Imp(Imp(Imp(PHI, PSI), PSI), Imp(Imp(PSI, PHI), PHI)),
    "L4": Imp(Imp(Neg(PSI), Neg(PHI)), Imp(PHI, PSI)),
    "R1": Iff(Nabla(ALPHA, Imp(PHI, PSI)), Imp(Nabla(ALPHA, PHI), Nabla(ALPHA, PSI))),
    # gamma = max(0, alpha - beta)
    "R2": Iff(Nabla(GAMMA, PHI), Imp(Nabla(BETA, PHI), Nabla(ALPHA, PHI))),
    # gamma = alpha * beta
    "R3": Iff(Nabla(ALPHA, Nabla(BETA, PHI)), Nabla(GAMMA, PHI)),
    "R4": Iff(Nabla(Fraction(1), PHI), PHI),
    "TOP": Neg(Bot()),
}
PATTERNS = {k: expand_derived(v) for k, v in _RAW.items()}
AXIOM_IDS = ("L1", "L2", "L3", "L4", "R1", "R2", "R3", "R4", "S1", "TOP")
FORMULA_METAS = {"L1": ("phi", "psi"), "L2": ("phi", "psi", "chi"), "L3": ("phi", "psi"), "L4": ("phi", "psi"),
                 "R1": ("phi", "psi"), "R2": ("phi",), "R3": ("phi",), "R4": ("phi",), "TOP": ()}
SCALAR_METAS = {"R1": ("alpha",), "R2": ("alpha", "beta"), "R3": ("alpha", "beta")}
S1_FAMILY_SEARCH = 64


def ominus(alpha: Fraction, beta: Fraction) -> Fraction:
    """alpha (.) beta* = max(0, alpha - beta)."""
    return max(Fraction(0), alpha - beta)


def _side_scalars(axiom_id, scalars):
    out = dict(scalars)
    if axiom_id == "R2":
        out["gamma"] = ominus(out["alpha"], out["beta"])
    elif axiom_id == "R3":
        out["gamma"] = out["alpha"] * out["beta"]
    return out


# -- substitution and unification -------------------------------------------


def apply(f: Formula, theta: Mapping) -> Formula:
    """Resolve metavariables of ``f`` under ``theta`` (bindings may chain)."""
    memo: dict = {}

    def scalar(q):
        while isinstance(q, SMeta) and q.name in theta:
            q = theta[q.name]
        return q

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key][1]
        if isinstance(node, Meta):
            out = go(theta[node.name]) if node.name in theta else node
        else:
            kids = [go(c) for c in children(node)]
            if isinstance(node, Nabla):
                out = Nabla(scalar(node.scalar), kids[0])
            elif all(a is b for a, b in zip(kids, children(node))):
                out = node
            else:
                out = _rebuild(node, kids)
        memo[key] = (node, out)
        return out

    return go(f)


def metas(f: Formula) -> set:
    found = set()
    stack, seen = [f], set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Meta):
            found.add(node.name)
        if isinstance(node, Nabla) and isinstance(node.scalar, SMeta):
            found.add(node.scalar.name)
        stack.extend(children(node))
    return found


def _walk(f, theta):
    while isinstance(f, Meta) and f.name in theta:
        f = theta[f.name]
    return f


def _walk_scalar(q, theta):
    while isinstance(q, SMeta) and q.name in theta:
        q = theta[q.name]
    return q


def _occurs(name, f, theta) -> bool:
    stack, seen = [f], set()
    while stack:
        node = _walk(stack.pop(), theta)
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Meta) and node.name == name:
            return True
        stack.extend(children(node))
    return False


def unify(a: Formula, b: Formula, theta: dict | None = None) -> dict | None:
    """Most general unifier extending ``theta`` (a new dict), or None."""
    theta = dict(theta or {})
    stack = [(a, b)]
    done = set()
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, theta), _walk(y, theta)
        if x is y or (id(x), id(y)) in done:
            continue
        done.add((id(x), id(y)))
        if isinstance(x, Meta) or isinstance(y, Meta):
            if isinstance(y, Meta) and not isinstance(x, Meta):
                x, y = y, x
            if isinstance(y, Meta) and y.name == x.name:
                continue
            if _occurs(x.name, y, theta):
                return None
            theta[x.name] = y
            continue
        if type(x) is not type(y):
            return None
        if isinstance(x, Var):
            if x.index != y.index:
                return None
        elif isinstance(x, Nabla):
            p, q = _walk_scalar(x.scalar, theta), _walk_scalar(y.scalar, theta)
            if isinstance(p, SMeta) or isinstance(q, SMeta):
                if isinstance(q, SMeta) and not isinstance(p, SMeta):
                    p, q = q, p
                if not (isinstance(q, SMeta) and q.name == p.name):
                    theta[p.name] = q
            elif p != q:
                return None
            stack.append((x.child, y.child))
        elif isinstance(x, SupFam):
            fx, fy = x.family, y.family
            if type(fx) is not type(fy):
                return None
            if isinstance(fx, FiniteList):
                if len(fx.members) != len(fy.members):
                    return None
                stack.extend(zip(fx.members, fy.members))
            else:
                if (fx.seq, fx.mono) != (fy.seq, fy.mono):
                    return None
                stack.append((fx.template, fy.template))
        else:
            if isinstance(x, (Times, Dbl)) and x.count != y.count:
                return None
            kx, ky = children(x), children(y)
            if len(kx) != len(ky):
                return None
            stack.extend(zip(kx, ky))
    return theta


def rename(f: Formula, suffix: str) -> Formula:
    """Rename every metavariable ``m`` of ``f`` to ``m + suffix``."""
    memo: dict = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key][1]
        if isinstance(node, Meta):
            out = Meta(node.name + suffix)
        else:
            kids = [go(c) for c in children(node)]
            if isinstance(node, Nabla):
                q = node.scalar
                out = Nabla(SMeta(q.name + suffix) if isinstance(q, SMeta) else q, kids[0])
            elif all(a is b for a, b in zip(kids, children(node))):
                out = node
            else:
                out = _rebuild(node, kids)
        memo[key] = (node, out)
        return out

    return go(f)


# -- recognition and instantiation ------------------------------------------


@dataclass(frozen=True)
class AxiomMatch:
    axiom_id: str
    subst: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    k: int | None = None


def match_axiom(f: Formula) -> AxiomMatch | None:
    """First axiom schema (order L1..S1, then TOP) of which ``f`` is an instance."""
    g = expand_derived(f)
    for axiom_id in AXIOM_IDS:
        if axiom_id == "S1":
            k = _match_s1(g)
            if k is not None:
                return AxiomMatch("S1", {"family": g.right.family}, {}, k)
            continue
        theta = unify(PATTERNS[axiom_id], g)
        if theta is None:
            continue
        subst = {m: theta[m] for m in FORMULA_METAS[axiom_id]}
        scalars = {m: theta[m] for m in SCALAR_METAS.get(axiom_id, ())}
        if axiom_id == "R2" and theta["gamma"] != ominus(scalars["alpha"], scalars["beta"]):
            continue
        if axiom_id == "R3" and theta["gamma"] != scalars["alpha"] * scalars["beta"]:
            continue
        return AxiomMatch(axiom_id, subst, scalars)
    return None


def _match_s1(g: Formula):
    if not (isinstance(g, Imp) and isinstance(g.right, SupFam)):
        return None
    fam, member = g.right.family, g.left
    if isinstance(fam, FiniteList):
        for k, m in enumerate(fam.members, start=1):
            if same(expand_derived(m), member):
                return k
        return len(fam.members) + 1 if isinstance(member, Bot) else None
    for k in range(1, S1_FAMILY_SEARCH + 1):
        if same(expand_derived(family_nth(fam, k)), member):
            return k
    return None


def instantiate(axiom_id: str, subst: Mapping, scalars: Mapping | None = None, k: int | None = None) -> Formula:
    """The instance of ``axiom_id``; S1 takes ``subst['family']`` and a 1-based ``k``."""
    scalars = {name: as_rational01(q) for name, q in (scalars or {}).items()}
    if axiom_id == "S1":
        fam = subst["family"]
        if isinstance(fam, SupFam):
            fam = fam.family
        if k is None or k < 1:
            raise ValueError("S1 needs a member index k >= 1")
        return Imp(expand_derived(family_nth(fam, k)), SupFam(fam))
    if axiom_id not in PATTERNS:
        raise ValueError(f"unknown axiom {axiom_id!r}")
    missing = [m for m in FORMULA_METAS[axiom_id] if m not in subst]
    missing += [m for m in SCALAR_METAS.get(axiom_id, ()) if m not in scalars]
    if missing:
        raise ValueError(f"{axiom_id} needs bindings for {', '.join(missing)}")
    theta = {m: expand_derived(subst[m]) for m in FORMULA_METAS[axiom_id]}
    theta.update(_side_scalars(axiom_id, {m: scalars[m] for m in SCALAR_METAS.get(axiom_id, ())}))
    return apply(PATTERNS[axiom_id], theta)


def is_instance(axiom_id: str, f: Formula, k: int | None = None) -> bool:
    """Whether ``f`` is an instance of the named schema (S1: at index ``k`` if given)."""
    g = expand_derived(f)
    if axiom_id == "S1":
        if not (isinstance(g, Imp) and isinstance(g.right, SupFam)):
            return False
        if k is None:
            return _match_s1(g) is not None
        return same(expand_derived(family_nth(g.right.family, k)), g.left)
    if axiom_id not in PATTERNS:
        return False
    theta = unify(PATTERNS[axiom_id], g)
    if theta is None:
        return False
    if axiom_id == "R2":
        return theta["gamma"] == ominus(theta["alpha"], theta["beta"])
    if axiom_id == "R3":
        return theta["gamma"] == theta["alpha"] * theta["beta"]
    return True
