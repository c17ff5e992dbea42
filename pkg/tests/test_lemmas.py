import pytest

from irlogic.formula import Bot, FiniteList, Imp, Neg, SupFam, Var, same
from irlogic.lemmas import (
    DNE,
    EXCH,
    IDENT,
    LIFT,
    PREF,
    ProofBuilder,
    ReplayError,
    adjunction,
    by_cases,
    contrapose,
    dne,
    dni,
    elaborate_inf,
    ex_falso,
    iff_intro,
    padding_lemma,
)
from irlogic.proof import check_proof
from irlogic.pwl import is_tautology
from irlogic.syntax import parse

X1, X2, X3 = Var(1), Var(2), Var(3)


def _proves(build, expected):
    b = ProofBuilder()
    p = b.build(build(b))
    assert check_proof(p).ok
    assert same(p.proved, parse(expected))
    return p


@pytest.mark.parametrize(
    "term, target",
    [
        (IDENT, "x1 -> x1"),
        (LIFT, "x1 -> (x1 -> x2) -> x2"),
        (EXCH, "(x1 -> x2 -> x3) -> x2 -> x1 -> x3"),
        (PREF, "(x2 -> x3) -> (x1 -> x2) -> x1 -> x3"),
        (DNE, "!!x1 -> x1"),
    ],
)
def test_dterms(term, target):
    _proves(lambda b: b.prove(term, parse(target)), target)


def test_dterm_wrong_target():
    with pytest.raises(ReplayError):
        ProofBuilder().prove(IDENT, parse("x1 -> x2"))


def test_double_negation_lemmas():
    _proves(lambda b: dne(b, parse("x1 -> x2")), "!!(x1 -> x2) -> x1 -> x2")
    _proves(lambda b: dni(b, X1), "x1 -> !!x1")


def test_contrapose():
    def build(b):
        return contrapose(b, b.axiom("L1", parse("x1 -> x2 -> x1")))

    _proves(build, "!(x2 -> x1) -> !x1")


def test_ex_falso_and_padding():
    p = _proves(lambda b: ex_falso(b, X2), "0 -> x2")
    assert len(p.steps) == 5
    assert check_proof(padding_lemma(parse("x1 (+) x3"))).ok


def test_adjunction_and_iff():
    _proves(lambda b: adjunction(b, X1, X2), "x1 -> x2 -> x1 (.) x2")

    def build(b):
        i = b.prove(DNE, parse("!!x1 -> x1"))
        j = dni(b, X1)
        return iff_intro(b, i, j)

    p = _proves(build, "!!x1 <-> x1")
    assert is_tautology(p.proved).verdict


def test_by_cases():
    v = SupFam(FiniteList((X1, X2)))

    def build(b):
        return by_cases(b, b.axiom("S1", Imp(X1, v), 1), b.axiom("S1", Imp(X2, v), 2))

    _proves(build, "x1 \\/ x2 -> V{x1; x2}")


def test_elaborate_inf_finite():
    p = elaborate_inf([parse("x1 -> x2"), parse("x1 -> x3")], parse("x1 -> W{x2; x3}"))
    assert check_proof(p).ok and same(p.proved, parse("x1 -> W{x2; x3}"))
    assert any(s.rule == "SUP" for s in p.steps)


def test_elaborate_inf_errors():
    with pytest.raises(ReplayError):
        elaborate_inf([], parse("x1 -> W{x2}"))
    with pytest.raises(ReplayError):
        elaborate_inf([parse("x2 -> x2")], parse("x1 -> W{x2}"))
    with pytest.raises(ReplayError):
        elaborate_inf([parse("x1 -> x2")], parse("x1 -> x2"))


def test_builder_dedupes_and_prunes():
    b = ProofBuilder()
    i = b.axiom("L1", parse("x1 -> x2 -> x1"))
    assert b.axiom("L1", parse("x1 -> x2 -> x1")) == i
    b.axiom("L1", parse("x3 -> x3 -> x3"))  # unused
    p = b.build(i)
    assert len(p.steps) == 1


def test_mp_requires_matching_antecedent():
    b = ProofBuilder()
    i = b.axiom("L1", parse("x1 -> x2 -> x1"))
    with pytest.raises(ReplayError):
        b.mp(i, i)
