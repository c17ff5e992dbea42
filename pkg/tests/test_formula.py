import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from irlogic.formula import (
    Bot,
    Delta,
    DyadicComplement,
    DyadicLevels,
    DyadicRampBelow,
    ExplicitEventuallyConstant,
    FiniteList,
    Iff,
    Imp,
    InfFam,
    Nabla,
    Neg,
    Oplus,
    Or,
    Schema,
    SupFam,
    Top,
    Var,
    depth,
    expand_derived,
    family_nth,
    is_finitary,
    same,
    subst,
    variables,
)
from irlogic.syntax import ParseError, format_formula, from_json, parse, parse_template, to_json

from support import rand_formula

X1, X2, X3 = Var(1), Var(2), Var(3)


# -- parse ---------------------------------------------------------------------


def test_parse_l1_instance():
    assert parse("x1 -> (x2 -> x1)") == Imp(X1, Imp(X2, X1))


def test_parse_top_is_neg_bot():
    assert parse("!0") == Neg(Bot())
    assert parse("1") == Neg(Bot())
    assert parse("1", expand=False) == Top()


def test_parse_delta_expands():
    assert parse("del(1/2, x1)") == Neg(Nabla(Fraction(1, 2), Neg(X1)))


def test_implication_is_right_associative():
    assert parse("x1 -> x2 -> x3") == Imp(X1, Imp(X2, X3))


def test_precedence_chain():
    # ! > (.) > (+) > /\ > \/ > -> > <->
    f = parse("!x1 (.) x2 (+) x3 /\\ x1 \\/ x2 -> x3 <-> x1", expand=False)
    assert isinstance(f, Iff)
    assert isinstance(f.left, Imp)
    assert isinstance(f.left.left, Or)
    assert format_formula(f) == "!x1 (.) x2 (+) x3 /\\ x1 \\/ x2 -> x3 <-> x1"


def test_finite_family_syntax():
    f = parse("V{x1; x2 -> x1}", expand=False)
    assert f == SupFam(FiniteList((X1, Imp(X2, X1))))
    g = parse("W{x1; x2}", expand=False)
    assert isinstance(g, InfFam)


def test_schema_syntax():
    f = parse("V[del(@s, x1); seq=complement; mono=inc]", expand=False)
    fam = f.family
    assert isinstance(fam, Schema) and fam.mono == "inc"
    assert fam.seq == DyadicComplement()
    g = parse("V[del(@s, x1); seq=explicit(1/2, 3/4, tail=1)]", expand=False)
    assert g.family.seq == ExplicitEventuallyConstant((Fraction(1, 2), Fraction(3, 4)), Fraction(1))
    assert parse("V[nab(@s, x1); seq=ramp_below(1/3)]").family.seq == DyadicRampBelow(Fraction(1, 3))
    assert parse("V[nab(@s, x1); seq=levels(3)]").family.seq == DyadicLevels(3)


@pytest.mark.parametrize(
    "text",
    ["x1 ->", "nab(3/2, x1)", "(x1", "x0", "V{}", "V[x1; seq=complement]", "V[del(@s, x1)]",
     "V[del(@s, x1); seq=unknown]", "del(@s, x1)", "x1 x2", "nab(1/0, x1)", "V[del(@s,x1); seq=complement; mono=up]"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse("x1 -> -> x2")
    assert info.value.position == 6


def test_decimal_scalars_rejected():
    with pytest.raises(ParseError):
        parse("nab(0.5, x1)")


# -- expansion -----------------------------------------------------------------


def test_expand_or():
    assert expand_derived(Or(X1, X2)) == Imp(Imp(X1, X2), X2)


def test_expand_inf_family():
    w = InfFam(FiniteList((X1, X2)))
    assert expand_derived(w) == Neg(SupFam(FiniteList((Neg(X1), Neg(X2)))))


def test_expand_delta_one():
    assert expand_derived(Delta(Fraction(1), X1)) == Neg(Nabla(Fraction(1), Neg(X1)))


def test_expand_oplus_and_iff():
    assert expand_derived(Oplus(X1, X2)) == Imp(Neg(X1), X2)
    iff = expand_derived(Iff(X1, X2))
    # (x1 -> x2) (.) (x2 -> x1) = !((x1 -> x2) -> !(x2 -> x1))
    assert iff == Neg(Imp(Imp(X1, X2), Neg(Imp(X2, X1))))


# -- families ------------------------------------------------------------------


def test_family_nth_padding():
    fam = FiniteList((X1, X2))
    assert family_nth(fam, 5) == Bot()
    assert family_nth(FiniteList((X1,)), 1) == X1


def test_family_nth_schema():
    fam = parse_template("V[del(@s, x1); seq=complement]", expand=False).family
    assert family_nth(fam, 3) == Delta(Fraction(7, 8), X1)


def test_family_nth_rejects_zero():
    with pytest.raises(ValueError):
        family_nth(FiniteList((X1,)), 0)


def test_finite_list_nonempty():
    with pytest.raises(ValueError):
        FiniteList(())


def test_finite_list_eventually_bot():
    fam = FiniteList((X1, X2, X3))
    assert all(family_nth(fam, n) == Bot() for n in range(4, 40))


@pytest.mark.parametrize("seq", [DyadicComplement(), DyadicRampBelow(Fraction(3, 5)), DyadicLevels(4),
                                 ExplicitEventuallyConstant((Fraction(1, 4), Fraction(1, 2)), Fraction(5, 8))])
def test_increasing_sequences_up_to_64(seq):
    assert seq.monotone == "inc"
    vals = [seq.value(n) for n in range(1, 66)]
    assert all(0 <= v <= 1 for v in vals)
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_sequence_values_by_hand():
    assert DyadicComplement().value(3) == Fraction(7, 8)
    assert DyadicRampBelow(Fraction(1, 2)).value(2) == Fraction(3, 8)
    assert DyadicLevels(2).value(3) == Fraction(3, 4)
    assert DyadicLevels(2).value(9) == 1


# -- substitution --------------------------------------------------------------


def test_subst_examples():
    psi = Imp(X2, X3)
    assert subst(Imp(X1, X1), {1: psi}) == Imp(psi, psi)
    assert subst(Nabla(Fraction(1, 2), X1), {1: Oplus(X2, X2)}) == Nabla(Fraction(1, 2), Oplus(X2, X2))
    assert subst(Imp(X1, X2), {1: X2}) == Imp(X2, X2)


def test_subst_is_simultaneous():
    assert subst(Imp(X1, X2), {1: X2, 2: X1}) == Imp(X2, X1)


# -- invariants ----------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=10**9)


@settings(max_examples=300, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=6))
def test_print_parse_round_trip(seed, n, d):
    f = rand_formula(random.Random(seed), n, d)
    text = format_formula(f)
    assert parse(text, expand=False) == f
    assert format_formula(parse(text, expand=False)) == text


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_expand_idempotent(seed):
    f = rand_formula(random.Random(seed), 3, 6)
    once = expand_derived(f)
    assert same(expand_derived(once), once)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_json_round_trip(seed):
    f = rand_formula(random.Random(seed), 3, 5)
    assert from_json(to_json(f)) == f


def test_schema_json_round_trip():
    f = parse("V[dbl(@n, del(@s, x1)); seq=ramp_below(1/2); mono=dec]", expand=False)
    assert from_json(to_json(f)) == f
    assert format_formula(parse(format_formula(f), expand=False)) == format_formula(f)


def test_whitespace_is_irrelevant():
    assert parse("  x1->(  x2->x1 )") == parse("x1 -> (x2 -> x1)")


def test_helpers():
    f = parse("x1 -> V{x2; x3}")
    assert variables(f) == {1, 2, 3}
    assert not is_finitary(f)
    assert is_finitary(parse("x1 -> x2"))
    assert depth(parse("x1 -> x2")) == 2


def test_struct_key_linear_on_shared_dag():
    f = X1
    for _ in range(200):
        f = Imp(f, f)
    g = X1
    for _ in range(200):
        g = Imp(g, g)
    assert same(f, g)
    assert not same(f, Imp(g, X1))
