"""Shared generators for the test suites: random formulas and proof mutations."""
from __future__ import annotations

import copy
import random
from fractions import Fraction

from irlogic.formula import Bot, Delta, Iff, Imp, Nabla, Neg, Odot, Oplus, Or, And, Top, Var
from irlogic.proof import RULES

BINARY = (Imp, Oplus, Odot, Or, And, Iff)


def rand_scalar(rng: random.Random, dens: int = 8) -> Fraction:
    d = rng.randint(1, dens)
    return Fraction(rng.randint(0, d), d)


def rand_formula(rng: random.Random, n: int, depth: int, dens: int = 8):
    """Random finitary formula over x1..xn with AST depth at most ``depth``."""
    if depth <= 1 or rng.random() < 0.15:
        roll = rng.random()
        if roll < 0.85:
            return Var(rng.randint(1, n))
        return Bot() if roll < 0.93 else Top()
    kind = rng.random()
    if kind < 0.15:
        return Neg(rand_formula(rng, n, depth - 1, dens))
    if kind < 0.25:
        return Nabla(rand_scalar(rng, dens), rand_formula(rng, n, depth - 1, dens))
    if kind < 0.35:
        return Delta(rand_scalar(rng, dens), rand_formula(rng, n, depth - 1, dens))
    op = rng.choice(BINARY)
    return op(rand_formula(rng, n, depth - 1, dens), rand_formula(rng, n, depth - 1, dens))


def rand_point(rng: random.Random, n: int, den: int = 64) -> tuple:
    out = []
    for _ in range(n):
        d = rng.randint(1, den)
        out.append(Fraction(rng.randint(0, d), d))
    return tuple(out)


# -- proof mutations ---------------------------------------------------------

MUTATIONS = ("ref", "swap", "rule", "formula", "delete")


def mutate(data: dict, rng: random.Random, kind: str | None = None) -> tuple:
    """One single-edit mutation of a proof in JSON form; returns (kind, new data)."""
    data = copy.deepcopy(data)
    steps = data["steps"]
    kinds = [kind] if kind else list(MUTATIONS)
    rng.shuffle(kinds)
    for k in kinds:
        if k == "ref":
            cands = [i for i, s in enumerate(steps) if s["refs"]]
            if not cands:
                continue
            i = rng.choice(cands)
            pos = rng.randrange(len(steps[i]["refs"]))
            old = steps[i]["refs"][pos]
            choices = [r for r in range(max(i, 1) + 1) if r != old]
            steps[i]["refs"][pos] = rng.choice(choices)
            return k, data
        if k == "swap":
            cands = [i for i, s in enumerate(steps) if len(s["refs"]) >= 2 and len(set(s["refs"])) > 1]
            if not cands:
                continue
            i = rng.choice(cands)
            refs = steps[i]["refs"]
            a, b = rng.sample(range(len(refs)), 2)
            while refs[a] == refs[b]:
                a, b = rng.sample(range(len(refs)), 2)
            refs[a], refs[b] = refs[b], refs[a]
            return k, data
        if k == "rule":
            i = rng.randrange(len(steps))
            steps[i]["rule"] = rng.choice([r for r in RULES if r != steps[i]["rule"]])
            return k, data
        if k == "formula":
            i = rng.randrange(len(steps))
            f = steps[i]["formula"]
            edits = [f"!({f})", f"({f}) -> x1", f.replace("x1", "x3", 1) if "x1" in f else f"x3 -> ({f})"]
            steps[i]["formula"] = rng.choice(edits)
            return k, data
        if k == "delete":
            if len(steps) < 2:
                continue
            del steps[rng.randrange(len(steps))]
            return k, data
    raise ValueError("no applicable mutation")
