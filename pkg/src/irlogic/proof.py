"""Hilbert-style proof objects and their checker.

Steps are indexed from 0; every reference must point to an earlier step.
``SUP`` over a finite family needs one premise ``phi_i -> psi`` per member, in
member order (the ``Bot`` padding is discharged by the shipped lemma
``0 -> psi``).  Over a schema it needs a :class:`ProofTemplate` whose
instantiation at n proves ``phi_n -> psi``; the checker samples n = 1..K and
marks the verdict ``schema_sampled``.  ``INF`` is accepted by elaborating it
into an ordinary proof that only uses ``SUP``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .axioms import AXIOM_IDS, instantiate, is_instance
from .formula import (
    FiniteList,
    Formula,
    Imp,
    Neg,
    Schema,
    SupFam,
    expand_derived,
    family_nth,
    fill_holes,
    free_holes,
    same,
)

RULES = AXIOM_IDS + ("HYP", "MP", "SUP", "INF", "OUTER")
DEFAULT_K = 8


# -- justifications ---------------------------------------------------------


@dataclass(frozen=True)
class Axiom:
    axiom_id: str
    subst: dict | None = None
    scalars: dict | None = None
    k: int | None = None

    def refs(self):
        return ()

    def renumbered(self, remap):
        return self


@dataclass(frozen=True)
class Hypothesis:
    index: int

    def refs(self):
        return ()

    def renumbered(self, remap):
        return self


@dataclass(frozen=True)
class MP:
    premise: int
    implication: int

    def refs(self):
        return (self.premise, self.implication)

    def renumbered(self, remap):
        return MP(remap[self.premise], remap[self.implication])


@dataclass(frozen=True)
class Outer:
    """Template step citing a step of the enclosing proof."""

    ref: int

    def refs(self):
        return ()

    def renumbered(self, remap):
        return self


@dataclass(frozen=True)
class ProofTemplate:
    """Steps whose formulas may contain the schema holes ``@s`` and ``@n``."""

    steps: tuple

    def instantiate(self, s, n) -> list:
        return [Step(expand_derived(fill_holes(st.formula, s, n)), st.justification) for st in self.steps]


@dataclass(frozen=True)
class SupRule:
    premises: tuple | None = None
    template: ProofTemplate | None = None

    def refs(self):
        return tuple(self.premises or ()) + self.outer_refs()

    def outer_refs(self) -> tuple:
        if self.template is None:
            return ()
        return tuple(st.justification.ref for st in self.template.steps if isinstance(st.justification, Outer))

    def renumbered(self, remap):
        premises = None if self.premises is None else tuple(remap[i] for i in self.premises)
        template = self.template
        if template is not None:
            template = ProofTemplate(tuple(
                Step(st.formula, Outer(remap[st.justification.ref])) if isinstance(st.justification, Outer) else st
                for st in template.steps
            ))
        return type(self)(premises, template)


@dataclass(frozen=True)
class InfRule(SupRule):
    pass


@dataclass(frozen=True)
class Step:
    formula: Formula
    justification: object

    def renumbered(self, remap):
        return Step(self.formula, self.justification.renumbered(remap))

    @property
    def rule(self) -> str:
        j = self.justification
        if isinstance(j, Axiom):
            return j.axiom_id
        return {Hypothesis: "HYP", MP: "MP", SupRule: "SUP", InfRule: "INF", Outer: "OUTER"}[type(j)]


@dataclass
class ProofObject:
    theory: list
    steps: list
    conclusion: Formula | None = None

    @property
    def proved(self) -> Formula:
        return self.steps[-1].formula


@dataclass
class Verdict:
    ok: bool
    failed_step: int | None = None
    reason: str = ""
    schema_sampled: bool = False
    report: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


class _Reject(Exception):
    pass


# -- checking ---------------------------------------------------------------


def _ref(refs, i, label):
    for r in refs:
        if not isinstance(r, int) or r < 0 or r >= i:
            raise _Reject(f"{label}: reference {r} does not point to an earlier step")


def _sup_shape(f: Formula):
    if not (isinstance(f, Imp) and isinstance(f.left, SupFam)):
        raise _Reject("SUP conclusion must have the form V F -> psi")
    return f.left.family, f.right


def _inf_shape(f: Formula):
    """``psi -> W F`` (expanded ``psi -> !V{!phi_i}``) gives ``(psi, F-members)``."""
    if isinstance(f, Imp) and isinstance(f.right, Neg) and isinstance(f.right.child, SupFam):
        fam = f.right.child.family
        if isinstance(fam, FiniteList) and all(isinstance(m, Neg) for m in fam.members):
            return f.left, fam
        if isinstance(fam, Schema) and isinstance(fam.template, Neg):
            return f.left, fam
    raise _Reject("INF conclusion must have the form psi -> W F")


def _check_template(template, fam: Schema, goal_of, outer, theory, K):
    for n in range(1, K + 1):
        s = fam.seq.value(n) if fam.seq is not None else None
        try:
            steps = template.instantiate(s, n)
        except ValueError as exc:
            raise _Reject(f"template instantiation failed at n={n}: {exc}") from None
        sub = _check_steps(steps, theory, outer, K)
        if not sub.ok:
            raise _Reject(f"template fails at n={n}, step {sub.failed_step}: {sub.reason}")
        member = expand_derived(family_nth(fam, n))
        if not same(steps[-1].formula, goal_of(member)):
            raise _Reject(f"template at n={n} does not prove the required premise")


def _check_step(step: Step, i: int, formulas: list, theory: list, outer, K: int) -> bool:
    """Raise :class:`_Reject` if step ``i`` fails; return True if it sampled a schema."""
    f, j = step.formula, step.justification
    if free_holes(f):
        raise _Reject("step formula contains template holes")
    if isinstance(j, Axiom):
        if j.axiom_id not in AXIOM_IDS:
            raise _Reject(f"unknown axiom {j.axiom_id!r}")
        if j.subst:
            try:
                inst = instantiate(j.axiom_id, j.subst, j.scalars, j.k)
            except (ValueError, KeyError) as exc:
                raise _Reject(f"bad instantiation: {exc}") from None
            if not same(inst, f):
                raise _Reject(f"formula is not the stated {j.axiom_id} instance")
        elif not is_instance(j.axiom_id, f, j.k):
            raise _Reject(f"formula is not an instance of {j.axiom_id}")
        return False
    if isinstance(j, Hypothesis):
        if not 0 <= j.index < len(theory):
            raise _Reject(f"no hypothesis {j.index}")
        if not same(theory[j.index], f):
            raise _Reject(f"formula differs from hypothesis {j.index}")
        return False
    if isinstance(j, Outer):
        if outer is None or not 0 <= j.ref < len(outer):
            raise _Reject("OUTER reference outside a template or out of range")
        if not same(outer[j.ref], f):
            raise _Reject("formula differs from the cited outer step")
        return False
    if isinstance(j, MP):
        _ref((j.premise, j.implication), i, "MP")
        imp = formulas[j.implication]
        if not (isinstance(imp, Imp) and same(imp.left, formulas[j.premise]) and same(imp.right, f)):
            raise _Reject(f"step {j.implication} is not (step {j.premise} -> this formula)")
        return False
    if isinstance(j, InfRule):
        return _check_inf(f, j, i, formulas, theory, outer, K)
    if isinstance(j, SupRule):
        fam, psi = _sup_shape(f)
        if isinstance(fam, FiniteList):
            if j.premises is None:
                raise _Reject("SUP over a finite family needs premise references")
            _ref(j.premises, i, "SUP")
            if len(j.premises) != len(fam.members):
                raise _Reject(f"SUP needs {len(fam.members)} premises, got {len(j.premises)}")
            for r, m in zip(j.premises, fam.members):
                if not same(formulas[r], Imp(expand_derived(m), psi)):
                    raise _Reject(f"step {r} is not the premise for member {m}")
            return False
        if j.template is None:
            raise _Reject("SUP over a schema needs a proof template")
        _check_template(j.template, fam, lambda m: Imp(m, psi), formulas[:i], theory, K)
        return True
    raise _Reject(f"unknown justification {j!r}")


def _check_inf(f, j, i, formulas, theory, outer, K) -> bool:
    psi, fam = _inf_shape(f)
    if isinstance(fam, FiniteList):
        if not j.premises:
            raise _Reject("INF needs premise references")
        _ref(j.premises, i, "INF")
        verdict = check_inf_rule([formulas[r] for r in j.premises], f, K=K)
    else:
        if j.template is None:
            raise _Reject("INF over a schema needs a proof template")
        verdict = check_inf_rule(None, f, K=K, template=j.template, outer=formulas[:i], theory=theory)
    if not verdict.ok:
        raise _Reject(f"INF elaboration rejected: {verdict.reason}")
    return verdict.schema_sampled


def _check_steps(steps: Sequence[Step], theory, outer, K) -> Verdict:
    formulas = []
    sampled = False
    report = []
    for i, step in enumerate(steps):
        try:
            sampled |= _check_step(step, i, formulas, theory, outer, K)
        except _Reject as exc:
            report.append(f"step {i} [{step.rule}] FAIL: {exc}")
            return Verdict(False, i, str(exc), sampled, report)
        report.append(f"step {i} [{step.rule}] ok")
        formulas.append(step.formula)
    return Verdict(True, None, "", sampled, report)


def check_proof(p: ProofObject, K: int = DEFAULT_K) -> Verdict:
    """Check every step; a declared ``conclusion`` must equal the last step."""
    if not p.steps:
        return Verdict(False, None, "empty proof")
    theory = [expand_derived(t) for t in p.theory]
    verdict = _check_steps(p.steps, theory, None, K)
    if verdict.ok and p.conclusion is not None and not same(expand_derived(p.conclusion), p.proved):
        verdict = Verdict(False, len(p.steps) - 1, "last step is not the declared conclusion", verdict.schema_sampled, verdict.report)
    return verdict


def check_inf_rule(premises, conclusion: Formula, K: int = DEFAULT_K, template=None, outer=None, theory=()) -> Verdict:
    """Accept ``psi -> W F`` from premises ``psi -> phi_i`` by elaboration.

    The elaborated derivation (contraposition of each premise, SUP, a final
    contraposition and double negation) is built and checked as an ordinary
    proof whose theory is the premise list.
    """
    from .lemmas import ReplayError, elaborate_inf

    try:
        proof = elaborate_inf(premises, expand_derived(conclusion), template=template, outer=outer, theory=theory)
    except (ReplayError, _Reject, ValueError) as exc:
        return Verdict(False, None, str(exc))
    verdict = check_proof(proof, K)
    if verdict.ok and not same(proof.proved, expand_derived(conclusion)):
        return Verdict(False, None, "elaboration proves a different formula")
    return verdict


# -- JSON -------------------------------------------------------------------


def _fmt(f):
    return str(f)


def step_to_json(step: Step) -> dict:
    j = step.justification
    out = {"formula": _fmt(step.formula), "rule": step.rule, "refs": []}
    if isinstance(j, Axiom):
        if j.subst:
            out["subst"] = {k: _fmt(v) for k, v in j.subst.items() if k != "family"}
        if j.scalars:
            out["scalars"] = {k: str(v) for k, v in j.scalars.items()}
        if j.k is not None:
            out.setdefault("scalars", {})["k"] = str(j.k)
    elif isinstance(j, Hypothesis):
        out["refs"] = [j.index]
    elif isinstance(j, MP):
        out["refs"] = [j.premise, j.implication]
    elif isinstance(j, Outer):
        out["refs"] = [j.ref]
    elif isinstance(j, SupRule):
        out["refs"] = list(j.premises or ())
        if j.template is not None:
            out["template"] = {"steps": [step_to_json(s) for s in j.template.steps]}
    return out


def proof_to_json(p: ProofObject) -> dict:
    out = {"theory": [_fmt(t) for t in p.theory], "steps": [step_to_json(s) for s in p.steps]}
    if p.conclusion is not None:
        out["conclusion"] = _fmt(p.conclusion)
    return out


def step_from_json(data: dict, in_template: bool = False) -> Step:
    from .syntax import parse, parse_template

    reader = parse_template if in_template else parse
    rule = data["rule"]
    refs = list(data.get("refs", []))
    f = reader(data["formula"])
    if rule in AXIOM_IDS:
        scalars = dict(data.get("scalars", {}))
        k = scalars.pop("k", None)
        subst = {name: reader(text) for name, text in data.get("subst", {}).items()} or None
        sc = {name: Fraction(v) for name, v in scalars.items()} or None
        return Step(f, Axiom(rule, subst, sc, int(k) if k is not None else None))
    if rule == "HYP":
        (i,) = refs
        return Step(f, Hypothesis(int(i)))
    if rule == "MP":
        a, b = refs
        return Step(f, MP(int(a), int(b)))
    if rule == "OUTER":
        (i,) = refs
        return Step(f, Outer(int(i)))
    if rule in ("SUP", "INF"):
        cls = SupRule if rule == "SUP" else InfRule
        template = None
        if "template" in data:
            template = ProofTemplate(tuple(step_from_json(s, True) for s in data["template"]["steps"]))
        return Step(f, cls(tuple(int(r) for r in refs) if refs or template is None else None, template))
    raise ValueError(f"unknown rule {rule!r}")


def proof_from_json(data: dict) -> ProofObject:
    from .syntax import parse

    steps = [step_from_json(s) for s in data["steps"]]
    conclusion = parse(data["conclusion"]) if "conclusion" in data else None
    return ProofObject([parse(t) for t in data.get("theory", [])], steps, conclusion)


def load_proof(path) -> ProofObject:
    with open(path) as fh:
        return proof_from_json(json.load(fh))


def check_proof_json(data, K: int = DEFAULT_K) -> Verdict:
    """Load and check a proof given as decoded JSON; malformed input is rejected."""
    try:
        p = proof_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        return Verdict(False, None, f"malformed proof: {exc}")
    return check_proof(p, K)
