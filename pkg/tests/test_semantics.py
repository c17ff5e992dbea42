import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from irlogic.formula import And, Bot, FiniteList, Iff, Imp, Odot, Or, SupFam, Var
from irlogic.semantics import (
    BoundsResult,
    UnboundVariable,
    check_axiom_soundness,
    eval,
    eval_sup,
    member_values,
    schema_closed_form,
)
from irlogic.syntax import parse

from support import rand_formula, rand_point

F = Fraction
X1, X2 = Var(1), Var(2)
SCHEMA = parse("V[del(@s, x1); seq=complement; mono=inc]")

rationals = st.fractions(min_value=0, max_value=1, max_denominator=64)
seeds = st.integers(min_value=0, max_value=10**9)


def test_eval_examples():
    assert eval(parse("x1 -> x2"), {1: F(3, 4), 2: F(1, 2)}) == F(3, 4)
    assert eval(parse("del(1/2, x1)"), {1: F(1, 2)}) == F(1, 4)
    assert eval(parse("x1 <-> x2"), {1: F(1, 5), 2: F(4, 5)}) == F(2, 5)


def test_eval_core_clauses():
    v = {1: F(1, 3)}
    assert eval(parse("0"), v) == 0
    assert eval(parse("!x1"), v) == F(2, 3)
    assert eval(parse("nab(1/4, x1)"), v) == 1 - F(1, 4) * F(2, 3)
    assert eval(parse("x1 (+) x1"), v) == F(2, 3)
    assert eval(parse("x1 (.) x1"), v) == 0


def test_eval_accepts_sequences():
    assert eval(parse("x1 -> x2"), (F(3, 4), F(1, 2))) == F(3, 4)


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        eval(parse("x1 -> x2"), {1: F(1, 2)})


def test_eval_rejects_floats_and_out_of_range():
    with pytest.raises(TypeError):
        eval(parse("x1"), {1: 0.5})
    with pytest.raises(ValueError):
        eval(parse("x1"), {1: F(3, 2)})


def test_finite_family_eval_is_max():
    f = parse("V{x1; x2; del(1/2, x1)}")
    assert eval(f, {1: F(1, 4), 2: F(1, 8)}) == F(1, 4)


def test_schema_needs_eval_sup():
    with pytest.raises(ValueError):
        eval(SCHEMA, {1: F(1)})


# -- eval_sup ------------------------------------------------------------------


def test_eval_sup_schema_at_one():
    assert eval_sup(SCHEMA, {1: 1}, 8) == BoundsResult(F(1), F(1), True)


def test_eval_sup_schema_at_zero():
    assert eval_sup(SCHEMA, {1: 0}, 8) == BoundsResult(F(0), F(0), True)


def test_eval_sup_without_closed_form():
    b = eval_sup(SCHEMA, {1: 1}, 3, closed_form=False)
    assert b == BoundsResult(F(7, 8), F(1), False)


def test_eval_sup_depth_zero():
    with pytest.raises(ValueError):
        eval_sup(SCHEMA, {1: 1}, 0)


def test_eval_sup_finite_is_exact():
    b = eval_sup(parse("V{x1; x2}"), {1: F(1, 3), 2: F(2, 3)}, 1)
    assert b == BoundsResult(F(2, 3), F(2, 3), True)


def test_eval_sup_nested_context():
    # !V[...] is scalar-antitone: value 1 - sup
    b = eval_sup(parse("!V[del(@s, x1); seq=complement; mono=inc]"), {1: F(1, 2)}, 8)
    assert b == BoundsResult(F(1, 2), F(1, 2), True)


@settings(max_examples=60, deadline=None)
@given(rationals)
def test_eval_sup_lower_bounds_monotone_in_depth(x):
    lows = [eval_sup(SCHEMA, {1: x}, d, closed_form=False).lower for d in range(1, 9)]
    assert all(a <= b for a, b in zip(lows, lows[1:]))
    exact = eval_sup(SCHEMA, {1: x}, 8)
    assert exact.exact and exact.lower == x
    assert all(lo <= exact.lower for lo in lows)


@settings(max_examples=60, deadline=None)
@given(rationals, st.integers(min_value=1, max_value=12))
def test_exact_results_are_fixed_points_of_deepening(x, d):
    assert eval_sup(SCHEMA, {1: x}, d) == eval_sup(SCHEMA, {1: x}, d + 5)


def test_closed_form_against_member_values():
    fam = SCHEMA.family
    for k in range(9):
        x = F(k, 8)
        cf = schema_closed_form(fam, {1: x})
        vals = member_values(fam, {1: x}, 40)
        assert cf.sup == x and max(vals) <= cf.sup
        assert cf.sup - max(vals) <= F(1, 2**40)


# -- axiom soundness -----------------------------------------------------------


def test_l3_soundness_on_samples():
    rng = random.Random(3)
    for _ in range(50):
        assert check_axiom_soundness("L3", {"phi": X1, "psi": X2}, rand_point(rng, 2))


def test_r2_soundness_example():
    assert check_axiom_soundness("R2", {"phi": X1}, {1: F(1, 2)}, {"alpha": F(1, 3), "beta": F(2, 3)})


def test_s1_soundness_example():
    rng = random.Random(4)
    fam = FiniteList((X1, X2))
    for _ in range(50):
        assert check_axiom_soundness("S1", {"family": fam}, rand_point(rng, 2), k=2)


def test_soundness_detects_non_axiom_value():
    # an R2-shaped formula with the wrong side scalar is not valid everywhere
    f = parse("nab(1/6, x1) <-> (nab(2/3, x1) -> nab(1/2, x1))")
    assert eval(f, {1: F(0)}) < 1


# -- derived identities ----------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_iff_is_one_minus_distance(seed):
    rng = random.Random(seed)
    a, b = rand_formula(rng, 3, 4), rand_formula(rng, 3, 4)
    v = rand_point(rng, 3)
    assert eval(Iff(a, b), v) == 1 - abs(eval(a, v) - eval(b, v))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_lattice_connectives(seed):
    rng = random.Random(seed)
    a, b = rand_formula(rng, 3, 4), rand_formula(rng, 3, 4)
    v = rand_point(rng, 3)
    assert eval(Or(a, b), v) == max(eval(a, v), eval(b, v))
    assert eval(And(a, b), v) == min(eval(a, v), eval(b, v))
    assert eval(Odot(a, b), v) == max(0, eval(a, v) + eval(b, v) - 1)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_mp_soundness(seed):
    rng = random.Random(seed)
    a, b = rand_formula(rng, 2, 4), rand_formula(rng, 2, 4)
    for _ in range(10):
        v = rand_point(rng, 2, 8)
        if eval(a, v) == 1 and eval(Imp(a, b), v) == 1:
            assert eval(b, v) == 1


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_sup_soundness_finite(seed):
    rng = random.Random(seed)
    members = [rand_formula(rng, 2, 3) for _ in range(rng.randint(1, 4))]
    psi = rand_formula(rng, 2, 3)
    v = rand_point(rng, 2, 8)
    if all(eval(Imp(m, psi), v) == 1 for m in members):
        assert eval(Imp(SupFam(FiniteList(tuple(members))), psi), v) == 1


def test_bot_padding_is_zero():
    assert eval(SupFam(FiniteList((Bot(),))), {}) == 0
