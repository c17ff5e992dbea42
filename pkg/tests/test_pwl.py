import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from irlogic.formula import Imp, Neg, Var
from irlogic.pwl import (
    AffineMap,
    PWLFunc,
    are_equivalent,
    audit,
    compile,
    constant,
    dump_json,
    grid_points,
    is_tautology,
    load_json,
    pwl_eval,
    pwl_eval_grid,
    pwl_maximum,
    pwl_min,
    semantic_consequence,
    sup_distance,
)
from irlogic.semantics import eval, evaluator
from irlogic.syntax import parse

from support import rand_formula

F = Fraction
seeds = st.integers(min_value=0, max_value=10**9)


def pieces_1d(f):
    out = []
    for cell, m in f.pieces:
        (lo,), (hi,) = cell.bbox()
        out.append(((lo, hi), (m.coefficients[0], m.constant)))
    return sorted(out)


def test_compile_oplus_pieces():
    f = compile(parse("x1 (+) x1"), 1)
    assert pieces_1d(f) == [((0, F(1, 2)), (2, 0)), ((F(1, 2), 1), (0, 1))]
    # grid oracle at step 1/16
    for k in range(17):
        x = F(k, 16)
        assert pwl_eval(f, (x,)) == min(1, 2 * x)


def test_compile_negation_and_delta():
    assert pieces_1d(compile(parse("!x1"), 1)) == [((0, 1), (-1, 1))]
    assert pieces_1d(compile(parse("del(1/3, x1)"), 1)) == [((0, 1), (F(1, 3), 0))]


def test_compile_errors():
    with pytest.raises(ValueError):
        compile(parse("x3"), 2)
    with pytest.raises(ValueError):
        compile(parse("V[del(@s, x1); seq=complement]"), 1)


def test_compile_finite_family_as_max():
    f = compile(parse("V{x1; !x1}"), 1)
    assert pwl_eval(f, (F(1, 4),)) == F(3, 4)
    assert pwl_min(f) == (F(1, 2), (F(1, 2),))


def test_pwl_eval_examples():
    f = compile(parse("x1 (+) x1"), 1)
    assert pwl_eval(f, (F(1, 4),)) == F(1, 2)
    assert pwl_eval(compile(parse("x2"), 2), (0, 1)) == 1
    assert pwl_eval(constant(3, 1), (F(1, 3), 0, F(2, 7))) == 1
    with pytest.raises(ValueError):
        pwl_eval(f, (F(3, 2),))


def test_pwl_min_examples():
    assert pwl_min(compile(parse("!x1"), 1)) == (0, (1,))
    assert pwl_min(compile(parse("((x1 -> x2) -> x2) -> ((x2 -> x1) -> x1)"), 2))[0] == 1
    assert pwl_min(compile(parse("x1 -> x1 (.) x1"), 1)) == (F(1, 2), (F(1, 2),))


def test_tautology_examples():
    assert is_tautology(parse("x1 -> (x2 -> x1)")).verdict
    r = is_tautology(parse("x1 -> x1 (.) x1"))
    assert not r.verdict and r.witness == (F(1, 2),) and r.value == F(1, 2)
    assert is_tautology(parse("1")).verdict


def test_sup_distance_examples():
    x = compile(parse("x1"), 1)
    assert sup_distance(x, x) == 0
    assert sup_distance(x, compile(parse("!x1"), 1)) == 1
    assert sup_distance(x, compile(parse("del(1/2, x1)"), 1)) == F(1, 2)
    with pytest.raises(ValueError):
        sup_distance(x, compile(parse("x1"), 2))


def test_equivalence_examples():
    assert are_equivalent(parse("x1 \\/ x2"), parse("(x1 -> x2) -> x2")).verdict
    assert are_equivalent(parse("x1 \\/ x2"), parse("V{x1; x2}")).verdict
    r = are_equivalent(parse("x1"), parse("x1 (+) x1"))
    assert not r.verdict and r.witness == (F(1, 2),) and r.value == F(1, 2)


def test_consequence_examples():
    assert semantic_consequence([parse("x1")], parse("x1")).verdict
    r = semantic_consequence([parse("x1 (+) x1")], parse("x1"))
    assert not r.verdict and r.witness == (F(1, 2),) and r.value == F(1, 2)
    assert semantic_consequence([parse("x1")], parse("x1 (.) x1")).verdict


def test_consequence_empty_region_is_vacuous():
    assert semantic_consequence([parse("0")], parse("x1")).verdict
    # x1 = 1 and !x1 = 1 never hold together
    assert semantic_consequence([parse("x1"), parse("!x1")], parse("0")).verdict


def test_json_dump_format_and_round_trip():
    f = compile(parse("x1 (+) x2"), 2)
    data = dump_json(f)
    assert data["dim"] == 2
    for piece in data["pieces"]:
        assert len(piece["affine"]) == 3
        assert all(isinstance(s, str) for s in piece["affine"])
        assert all(len(row) == 3 for row in piece["ineqs"])
    g = load_json(data)
    assert sup_distance(f, g) == 0


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_compile_agrees_with_eval(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    f = rand_formula(rng, n, 5)
    h = compile(f, n)
    ev = evaluator(f)
    grid = pwl_eval_grid(h, 8)
    for p in grid_points(n, 8):
        ks = tuple(int(x * 8) for x in p)
        assert grid[ks] == ev(p)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_grid_evaluator_matches_pointwise(seed):
    rng = random.Random(seed)
    f = compile(rand_formula(rng, 2, 5), 2)
    grid = pwl_eval_grid(f, 16)
    assert len(grid) == 17 * 17
    for p in grid_points(2, 16):
        assert grid[tuple(int(x * 16) for x in p)] == pwl_eval(f, p)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_audit_passes(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    assert audit(compile(rand_formula(rng, n, 6), n)) == []


def test_audit_catches_broken_complex():
    f = compile(parse("x1 (+) x1"), 1)
    cell, _ = f.pieces[0]
    bad = PWLFunc(1, [(cell, AffineMap((F(3),), F(0)))] + f.pieces[1:])
    assert audit(bad)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_negation_duality(seed):
    rng = random.Random(seed)
    f = rand_formula(rng, 2, 5)
    assert pwl_maximum(compile(f, 2))[0] == 1 - pwl_min(compile(Neg(f), 2))[0]


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_distance_is_a_metric(seed):
    rng = random.Random(seed)
    a, b, c = (compile(rand_formula(rng, 2, 4), 2) for _ in range(3))
    ab, ba = sup_distance(a, b), sup_distance(b, a)
    assert ab == ba
    assert sup_distance(a, c) <= ab + sup_distance(b, c)
    same_on_grid = all(pwl_eval(a, p) == pwl_eval(b, p) for p in grid_points(2, 16))
    if ab == 0:
        assert same_on_grid
    # a positive distance is attained at its witness
    if ab > 0:
        from irlogic.pwl import sup_distance_witness

        d, w = sup_distance_witness(a, b)
        assert abs(pwl_eval(a, w) - pwl_eval(b, w)) == d


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_semantic_mp_closure(seed):
    rng = random.Random(seed)
    a, b = rand_formula(rng, 2, 4), rand_formula(rng, 2, 4)
    if is_tautology(a, 2).verdict and is_tautology(Imp(a, b), 2).verdict:
        assert is_tautology(b, 2).verdict


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_failed_tautology_witness_is_countermodel(seed):
    rng = random.Random(seed)
    f = rand_formula(rng, 2, 5)
    r = is_tautology(f, 2)
    if not r.verdict:
        assert r.value < 1 and eval(f, r.witness) == r.value
