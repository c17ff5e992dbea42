"""Builders for the shipped proof corpus.

The JSON files under ``irlogic/corpus`` are produced by :func:`write_corpus`;
:func:`load` reads them back through the kernel's own JSON reader.
"""
from __future__ import annotations

import json
from importlib import resources

from .formula import FiniteList, Imp, Or, SupFam, Var, expand_derived
from .lemmas import LIFT, ProofBuilder, by_cases, ex_falso, identity, iff_intro
from .proof import MP, Outer, ProofObject, ProofTemplate, Step, SupRule, InfRule, Axiom, proof_from_json, proof_to_json
from .syntax import parse, parse_template

X1, X2 = Var(1), Var(2)


def _finish(b: ProofBuilder, goal: int) -> ProofObject:
    p = b.build(goal)
    p.conclusion = p.proved
    return p


def identity_proof() -> ProofObject:
    b = ProofBuilder()
    return _finish(b, identity(b, X1))


def _sup_to_or(b: ProofBuilder) -> int:
    v = SupFam(FiniteList((X1, X2)))
    o = expand_derived(Or(X1, X2))
    first = b.prove(LIFT, Imp(X1, o))
    second = b.axiom("L1", Imp(X2, o))
    return b.sup(Imp(v, o), [first, second])


def _or_to_sup(b: ProofBuilder) -> int:
    v = SupFam(FiniteList((X1, X2)))
    i = b.axiom("S1", Imp(X1, v), 1)
    j = b.axiom("S1", Imp(X2, v), 2)
    return by_cases(b, i, j)


def sup_to_or_proof() -> ProofObject:
    """V{x1; x2} -> x1 \\/ x2 by SUP."""
    b = ProofBuilder()
    return _finish(b, _sup_to_or(b))


def or_to_sup_proof() -> ProofObject:
    """x1 \\/ x2 -> V{x1; x2} from two S1 instances."""
    b = ProofBuilder()
    return _finish(b, _or_to_sup(b))


def or_sup_iff_proof() -> ProofObject:
    b = ProofBuilder()
    there = _or_to_sup(b)
    back = _sup_to_or(b)
    return _finish(b, iff_intro(b, there, back))


def inf_proof() -> ProofObject:
    """x1 -> W{x1; x2 -> x1} by INF from x1 -> x1 and x1 -> (x2 -> x1)."""
    b = ProofBuilder()
    first = identity(b, X1)
    second = b.axiom("L1", Imp(X1, Imp(X2, X1)))
    goal = b.inf(parse("x1 -> W{x1; x2 -> x1}"), [first, second])
    return _finish(b, goal)


def ex_falso_proof() -> ProofObject:
    b = ProofBuilder()
    return _finish(b, ex_falso(b, X2))


def schema_sup_proof() -> ProofObject:
    """V[del(@s, x1); seq=complement] -> (x1 -> x1), one template for all n."""
    b = ProofBuilder()
    ident = identity(b, X1)
    goal = parse("V[del(@s, x1); seq=complement; mono=inc] -> (x1 -> x1)")
    template = ProofTemplate((
        Step(expand_derived(parse("x1 -> x1")), Outer(ident)),
        Step(parse_template("(x1 -> x1) -> (del(@s, x1) -> (x1 -> x1))"), Axiom("L1")),
        Step(parse_template("del(@s, x1) -> (x1 -> x1)"), MP(0, 1)),
    ))
    i = b.sup(goal, [])
    b.steps[i] = Step(b.formula(i), SupRule(None, template))
    return _finish(b, i)


BUILDERS = {
    "identity": identity_proof,
    "sup_to_or": sup_to_or_proof,
    "or_to_sup": or_to_sup_proof,
    "or_sup_iff": or_sup_iff_proof,
    "inf_elaboration": inf_proof,
    "ex_falso": ex_falso_proof,
    "schema_sup": schema_sup_proof,
}


def names() -> list:
    return sorted(BUILDERS)


def load_json(name: str) -> dict:
    text = resources.files("irlogic").joinpath("corpus", f"{name}.json").read_text()
    return json.loads(text)


def load(name: str) -> ProofObject:
    return proof_from_json(load_json(name))


def write_corpus(directory) -> None:
    from pathlib import Path

    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        data = proof_to_json(build())
        (out / f"{name}.json").write_text(json.dumps(data, indent=1) + "\n")
