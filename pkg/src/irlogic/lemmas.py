"""Proof construction: condensed-detachment replay and derived lemmas.

A D-term names a Hilbert derivation: an axiom id (``"L1"``), an already
proved step (an ``int`` index in the builder), or ``("D", major, minor)``
meaning modus ponens of ``minor`` into ``major``.  :meth:`ProofBuilder.prove`
unifies the most general conclusion of a D-term with the requested target and
emits the fully instantiated steps; metavariables the target leaves open are
set to ``Bot``.
"""
from __future__ import annotations

import itertools

from .axioms import PATTERNS, SMeta, apply, metas, rename, unify
from .formula import Bot, FiniteList, Formula, Imp, Meta, Neg, SupFam, expand_derived, iter_nodes, same, struct_key
from .proof import Axiom, Hypothesis, InfRule, MP, ProofObject, Step, SupRule

_fresh = itertools.count()


class ReplayError(ValueError):
    pass


def _ground(f: Formula, theta: dict) -> Formula:
    f = apply(f, theta)
    left = {node.name for node in iter_nodes(f) if isinstance(node, Meta)}
    if left:
        f = apply(f, {name: Bot() for name in left})
    if metas(f):
        raise ReplayError(f"unresolved scalar metavariables {sorted(metas(f))}")
    return f


class ProofBuilder:
    """Accumulates steps, one per distinct formula."""

    def __init__(self, theory=()):
        self.theory = [expand_derived(t) for t in theory]
        self.steps: list = []
        self.index: dict = {}

    def formula(self, i: int) -> Formula:
        return self.steps[i].formula

    def _add(self, step: Step) -> int:
        key = struct_key(step.formula)
        if key in self.index:
            return self.index[key]
        self.steps.append(step)
        self.index[key] = len(self.steps) - 1
        return len(self.steps) - 1

    def find(self, f: Formula) -> int | None:
        return self.index.get(struct_key(expand_derived(f)))

    def axiom(self, axiom_id: str, f: Formula, k: int | None = None) -> int:
        return self._add(Step(expand_derived(f), Axiom(axiom_id, k=k)))

    def hyp(self, i: int) -> int:
        return self._add(Step(self.theory[i], Hypothesis(i)))

    def mp(self, i: int, j: int) -> int:
        """From step i (A) and step j (A -> B) derive B."""
        imp = self.formula(j)
        if not (isinstance(imp, Imp) and same(imp.left, self.formula(i))):
            raise ReplayError(f"step {j} is not an implication from step {i}")
        from .axioms import match_axiom

        m = match_axiom(imp.right)
        if m is not None:
            return self.axiom(m.axiom_id, imp.right, m.k)
        return self._add(Step(imp.right, MP(i, j)))

    def sup(self, conclusion: Formula, premises: list) -> int:
        return self._add(Step(expand_derived(conclusion), SupRule(tuple(premises))))

    def inf(self, conclusion: Formula, premises: list) -> int:
        return self._add(Step(expand_derived(conclusion), InfRule(tuple(premises))))

    # -- replay ---------------------------------------------------------

    def prove(self, dterm, target: Formula | None = None) -> int:
        theta: dict = {}
        tree = self._cd(dterm, theta)
        if target is not None:
            theta = unify(tree[0], expand_derived(target), theta)
            if theta is None:
                raise ReplayError("D-term does not prove the target")
        return self._emit(tree, theta)

    def _cd(self, term, theta):
        if isinstance(term, str):
            return (rename(PATTERNS[term], f"_{next(_fresh)}"), "ax", term)
        if isinstance(term, int):
            return (self.formula(term), "step", term)
        tag, major, minor = term
        if tag != "D":
            raise ReplayError(f"bad D-term {term!r}")
        a = self._cd(major, theta)
        b = self._cd(minor, theta)
        x, y = Meta(f"_x{next(_fresh)}"), Meta(f"_y{next(_fresh)}")
        new = unify(a[0], Imp(x, y), theta)
        if new is None:
            raise ReplayError("major premise is not an implication")
        new = unify(x, b[0], new)
        if new is None:
            raise ReplayError("minor premise does not fit the major premise")
        theta.clear()
        theta.update(new)
        return (y, "mp", a, b)

    def _emit(self, tree, theta) -> int:
        kind = tree[1]
        if kind == "step":
            return tree[2]
        if kind == "ax":
            return self.axiom(tree[2], _ground(tree[0], theta))
        i = self._emit(tree[3], theta)
        j = self._emit(tree[2], theta)
        return self.mp(i, j)

    def build(self, goal: int) -> ProofObject:
        """Proof of step ``goal`` keeping only the steps it depends on."""
        needed = set()
        stack = [goal]
        while stack:
            i = stack.pop()
            if i in needed:
                continue
            needed.add(i)
            stack.extend(self.steps[i].justification.refs())
        order = sorted(needed)
        remap = {old: new for new, old in enumerate(order)}
        steps = [self.steps[i].renumbered(remap) for i in order]
        return ProofObject(list(self.theory), steps)


# D-terms over the four propositional axioms, found by condensed-detachment search
IDENT = ("D", ("D", "L2", "L1"), ("D", "L3", ("D", "L1", "L1")))  # A -> A
LIFT = ("D", ("D", "L2", "L1"), "L3")  # A -> ((A -> B) -> B)
EXCH = ("D", ("D", ("D", "L2", "L2"), ("D", "L2", "L2")), LIFT)  # (A -> (B -> C)) -> (B -> (A -> C))
PREF = ("D", ("D", "L2", "L1"), ("D", ("D", "L2", "L3"), ("D", "L2", "L2")))  # (B -> C) -> ((A -> B) -> (A -> C))
# !!A -> (B -> A), then B := (C -> C) discharged by LIFT applied to IDENT
WEAK_DNE = ("D", ("D", "L2", ("D", ("D", "L2", "L1"), "L4")), ("D", ("D", "L2", "L4"), IDENT))
DNE = ("D", ("D", "L2", WEAK_DNE), ("D", LIFT, IDENT))  # !!A -> A
DNI = ("D", "L4", DNE)  # A -> !!A


def identity(b: ProofBuilder, a: Formula) -> int:
    return b.prove(IDENT, Imp(a, a))


def syllogism(b: ProofBuilder, i: int, j: int) -> int:
    """From A -> B (step i) and B -> C (step j) derive A -> C."""
    ab, bc = b.formula(i), b.formula(j)
    l2 = b.axiom("L2", Imp(ab, Imp(bc, Imp(ab.left, bc.right))))
    return b.mp(j, b.mp(i, l2))


def exchange(b: ProofBuilder, i: int) -> int:
    """From A -> (B -> C) derive B -> (A -> C)."""
    f = b.formula(i)
    a, (bb, c) = f.left, (f.right.left, f.right.right)
    return b.mp(i, b.prove(EXCH, Imp(f, Imp(bb, Imp(a, c)))))


def dne(b: ProofBuilder, a: Formula) -> int:
    return b.prove(DNE, Imp(Neg(Neg(a)), a))


def dni(b: ProofBuilder, a: Formula) -> int:
    return b.prove(DNI, Imp(a, Neg(Neg(a))))


def contraposition(b: ProofBuilder, c: Formula, d: Formula) -> int:
    """(C -> D) -> (!D -> !C)."""
    nnc, nnd = Neg(Neg(c)), Neg(Neg(d))
    l2 = b.axiom("L2", Imp(Imp(nnc, c), Imp(Imp(c, d), Imp(nnc, d))))
    a1 = b.mp(dne(b, c), l2)
    pref = b.prove(PREF, Imp(Imp(d, nnd), Imp(Imp(nnc, d), Imp(nnc, nnd))))
    a2 = b.mp(dni(b, d), pref)
    a3 = b.axiom("L4", Imp(Imp(nnc, nnd), Imp(Neg(d), Neg(c))))
    return syllogism(b, syllogism(b, a1, a2), a3)


def contrapose(b: ProofBuilder, i: int) -> int:
    """From A -> B derive !B -> !A."""
    f = b.formula(i)
    return b.mp(i, contraposition(b, f.left, f.right))


def ex_falso(b: ProofBuilder, psi: Formula) -> int:
    """0 -> psi, from TOP, L1 and L4."""
    top = Neg(Bot())
    l1 = b.axiom("L1", Imp(top, Imp(Neg(psi), top)))
    step = b.mp(b.axiom("TOP", top), l1)
    l4 = b.axiom("L4", Imp(Imp(Neg(psi), top), Imp(Bot(), psi)))
    return b.mp(step, l4)


def adjunction(b: ProofBuilder, a: Formula, c: Formula) -> int:
    """A -> (C -> A (.) C) with A (.) C = !(A -> !C)."""
    x = Neg(Imp(a, Neg(c)))
    e1 = b.prove(LIFT, Imp(a, Imp(Imp(a, Neg(c)), Neg(c))))
    e2 = contraposition(b, Imp(a, Neg(c)), Neg(c))
    l2 = b.axiom("L2", Imp(Imp(c, Neg(Neg(c))), Imp(Imp(Neg(Neg(c)), x), Imp(c, x))))
    e3 = b.mp(dni(b, c), l2)
    return syllogism(b, syllogism(b, e1, e2), e3)


def iff_intro(b: ProofBuilder, i: int, j: int) -> int:
    """From A -> B and B -> A derive A <-> B."""
    adj = adjunction(b, b.formula(i), b.formula(j))
    return b.mp(j, b.mp(i, adj))


def by_cases(b: ProofBuilder, i: int, j: int) -> int:
    """From A -> V (step i) and B -> V (step j) derive (A \\/ B) -> V."""
    a, v = b.formula(i).left, b.formula(i).right
    bb = b.formula(j).left
    s1 = b.mp(i, b.axiom("L2", Imp(Imp(a, v), Imp(Imp(v, bb), Imp(a, bb)))))
    s2 = b.mp(s1, b.axiom("L2", Imp(Imp(Imp(v, bb), Imp(a, bb)), Imp(Imp(Imp(a, bb), bb), Imp(Imp(v, bb), bb)))))
    s3 = b.axiom("L3", Imp(Imp(Imp(v, bb), bb), Imp(Imp(bb, v), v)))
    s4 = exchange(b, syllogism(b, s2, s3))
    return b.mp(j, s4)


def padding_lemma(psi: Formula) -> ProofObject:
    b = ProofBuilder()
    return b.build(ex_falso(b, expand_derived(psi)))


# -- INF elaboration ---------------------------------------------------------


def elaborate_inf(premises, conclusion: Formula, template=None, outer=None, theory=()) -> ProofObject:
    """Ordinary proof of ``psi -> W F`` from the premises ``psi -> phi_i``.

    Finite families: the proof's theory is the premise list.  Schemas: the
    premise template is extended by the contraposition steps and the result
    feeds a SUP template; the theory is the enclosing theory and ``outer``
    steps are re-cited as hypotheses.
    """
    from .proof import Outer, ProofTemplate, Step

    if not (isinstance(conclusion, Imp) and isinstance(conclusion.right, Neg) and isinstance(conclusion.right.child, SupFam)):
        raise ReplayError("conclusion is not of the form psi -> W F")
    psi = conclusion.left
    neg_fam = conclusion.right.child.family
    if isinstance(neg_fam, FiniteList):
        if not premises:
            raise ReplayError("INF needs at least one premise")
        members = [m.child if isinstance(m, Neg) else None for m in neg_fam.members]
        if None in members or len(members) != len(premises):
            raise ReplayError("premises do not match the family")
        b = ProofBuilder(premises)
        contra = []
        for k, (prem, phi) in enumerate(zip(b.theory, members)):
            if not same(prem, Imp(psi, phi)):
                raise ReplayError(f"premise {k} is not psi -> member {k + 1}")
            contra.append(contrapose(b, b.hyp(k)))
        sup = b.sup(Imp(SupFam(neg_fam), Neg(psi)), contra)
    else:
        if template is None:
            raise ReplayError("INF over a schema needs a template")
        # extend the premise template: psi -> phi_n  ==>  !phi_n -> !psi
        tb = ProofBuilder(theory)
        for st in template.steps:
            tb._add(st)
        last = len(tb.steps) - 1
        if not same(tb.formula(last).left, psi):
            raise ReplayError("template does not prove psi -> phi_n")
        goal = contrapose(tb, last)
        sub = tb.build(goal)
        b = ProofBuilder(theory)
        sup = b.sup(Imp(SupFam(neg_fam), Neg(psi)), [])
        b.steps[sup] = Step(b.formula(sup), SupRule(None, ProofTemplate(tuple(sub.steps))))
        if outer:
            # the template cites outer steps by index; keep them at the same positions
            raise ReplayError("schema INF elaboration with outer references is not supported")
    s2 = contrapose(b, sup)  # !!psi -> !V{!phi}
    goal = syllogism(b, dni(b, psi), s2)
    proof = b.build(goal)
    proof.conclusion = conclusion
    return proof
