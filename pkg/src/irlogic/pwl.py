"""Finitary formulas as exact piecewise-linear functions on [0,1]^n.

A :class:`PWLFunc` is a list of convex cells (full-dimensional polytopes)
covering the cube, each carrying one affine map.  :func:`compile` builds it
structurally; implication splits the overlay of its operands along the
hyperplane where ``1 - f + g`` reaches 1.  Because an affine map attains its
extrema at vertices, min/max/distance reduce to vertex enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .formula import Bot, FiniteList, Formula, Imp, Nabla, Neg, SupFam, Var, expand_derived, free_holes, variables
from .polytope import Polytope, dot

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class AffineMap:
    coefficients: tuple
    constant: Fraction

    def __call__(self, x: Sequence) -> Fraction:
        return dot(self.coefficients, x) + self.constant

    def scale(self, c, shift) -> "AffineMap":
        """``c * self + shift``."""
        return AffineMap(tuple(c * a for a in self.coefficients), c * self.constant + shift)

    def minus(self, other: "AffineMap") -> "AffineMap":
        return AffineMap(
            tuple(a - b for a, b in zip(self.coefficients, other.coefficients)),
            self.constant - other.constant,
        )

    @classmethod
    def const(cls, n: int, c) -> "AffineMap":
        return cls((ZERO,) * n, Fraction(c))

    @classmethod
    def proj(cls, n: int, i: int) -> "AffineMap":
        return cls(tuple(ONE if j == i else ZERO for j in range(n)), ZERO)


@dataclass
class PWLFunc:
    dim: int
    pieces: list  # [(Polytope, AffineMap)]

    def __len__(self):
        return len(self.pieces)


@dataclass(frozen=True)
class DecisionReport:
    verdict: bool
    witness: tuple | None = None
    value: Fraction | None = None


def constant(n: int, c) -> PWLFunc:
    return PWLFunc(n, [(Polytope.cube(n), AffineMap.const(n, c))])


def _mapped(f: PWLFunc, c, shift) -> PWLFunc:
    return PWLFunc(f.dim, [(cell, m.scale(c, shift)) for cell, m in f.pieces])


def _boxes_meet(p: Polytope, q: Polytope) -> bool:
    plo, phi = p.bbox()
    qlo, qhi = q.bbox()
    return all(a < d and c < b for a, b, c, d in zip(plo, phi, qlo, qhi))


def overlay(fs: Sequence[PWLFunc]):
    """Common refinement: list of ``(cell, [map of each input])``."""
    cells = [(cell, [m]) for cell, m in fs[0].pieces]
    for g in fs[1:]:
        nxt = []
        for cell, maps in cells:
            for other, m in g.pieces:
                if not _boxes_meet(cell, other):
                    continue
                inter = cell.cut_all(other.non_cube_constraints())
                if inter is not None:
                    nxt.append((inter, maps + [m]))
        cells = nxt
    return cells


def _split(cell: Polytope, d: AffineMap):
    """Parts of ``cell`` where ``d <= 0`` and ``d >= 0`` (None if empty interior)."""
    lo = cell.cut(d.coefficients, -d.constant)
    hi = cell.cut(tuple(-a for a in d.coefficients), d.constant)
    return lo, hi


def _collapse(n: int, pieces: list) -> PWLFunc:
    first = pieces[0][1]
    if all(m == first for _, m in pieces):
        return PWLFunc(n, [(Polytope.cube(n), first)])
    return PWLFunc(n, pieces)


def pwl_imp(f: PWLFunc, g: PWLFunc) -> PWLFunc:
    """min(1, 1 - f + g)."""
    out = []
    for cell, (a, b) in overlay([f, g]):
        h = b.minus(a).scale(ONE, ONE)
        vals = [h(v) for v in cell.vertices]
        if all(x >= 1 for x in vals):
            out.append((cell, AffineMap.const(f.dim, 1)))
        elif all(x <= 1 for x in vals):
            out.append((cell, h))
        else:
            below, above = _split(cell, h.scale(ONE, -ONE))
            out.append((below, h))
            out.append((above, AffineMap.const(f.dim, 1)))
    return _collapse(f.dim, out)


def pwl_max(fs: Sequence[PWLFunc]) -> PWLFunc:
    acc = fs[0]
    for g in fs[1:]:
        out = []
        for cell, (a, b) in overlay([acc, g]):
            d = a.minus(b)
            vals = [d(v) for v in cell.vertices]
            if all(x >= 0 for x in vals):
                out.append((cell, a))
            elif all(x <= 0 for x in vals):
                out.append((cell, b))
            else:
                b_side, a_side = _split(cell, d)
                out.append((a_side, a))
                out.append((b_side, b))
        acc = _collapse(acc.dim, out)
    return acc


def compile(f: Formula, n: int | None = None) -> PWLFunc:
    """Term function of a finitary formula on [0,1]^n."""
    g = expand_derived(f)
    if free_holes(g):
        raise ValueError("cannot compile a formula with template holes")
    vs = variables(g)
    if n is None:
        n = max(vs, default=1)
    if vs and max(vs) > n:
        raise ValueError(f"variable x{max(vs)} exceeds dimension {n}")
    memo: dict = {}

    def go(node):
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(node, Var):
            out = PWLFunc(n, [(Polytope.cube(n), AffineMap.proj(n, node.index - 1))])
        elif isinstance(node, Bot):
            out = constant(n, 0)
        elif isinstance(node, Neg):
            out = _mapped(go(node.child), -ONE, ONE)
        elif isinstance(node, Nabla):
            # 1 - a (1 - x) = a x + (1 - a)
            out = _mapped(go(node.child), node.scalar, 1 - node.scalar)
        elif isinstance(node, Imp):
            out = pwl_imp(go(node.left), go(node.right))
        elif isinstance(node, SupFam):
            if not isinstance(node.family, FiniteList):
                raise ValueError("schematic disjunctions have no PWL compilation")
            out = pwl_max([go(m) for m in node.family.members] + [constant(n, 0)])
        else:
            raise TypeError(f"not a core node: {node!r}")
        memo[key] = (node, out)
        return out

    return go(g)


def _check_point(f: PWLFunc, p: Sequence) -> tuple:
    if len(p) != f.dim:
        raise ValueError(f"point has {len(p)} coordinates, expected {f.dim}")
    p = tuple(Fraction(x) for x in p)
    if any(not 0 <= x <= 1 for x in p):
        raise ValueError("point outside the unit cube")
    return p


def pwl_eval(f: PWLFunc, p: Sequence) -> Fraction:
    p = _check_point(f, p)
    for cell, m in f.pieces:
        if cell.contains(p):
            return m(p)
    raise ValueError("point not covered by any cell")


def _extreme(f: PWLFunc, sign: int):
    best = None
    for cell, m in f.pieces:
        for v in cell.vertices:
            val = m(v)
            key = (sign * val, v)
            if best is None or key < best[0]:
                best = (key, val, v)
    return best[1], best[2]


def pwl_min(f: PWLFunc):
    """``(minimum, witness)``; the witness is the lexicographically least minimizer."""
    return _extreme(f, 1)


def pwl_maximum(f: PWLFunc):
    return _extreme(f, -1)


def sup_distance_witness(f: PWLFunc, g: PWLFunc):
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    best = None
    for cell, (a, b) in overlay([f, g]):
        d = a.minus(b)
        for v in cell.vertices:
            val = abs(d(v))
            key = (-val, v)
            if best is None or key < best[0]:
                best = (key, val, v)
    return best[1], best[2]


def sup_distance(f: PWLFunc, g: PWLFunc) -> Fraction:
    return sup_distance_witness(f, g)[0]


def _dim_for(fs, n):
    if n is not None:
        return n
    return max([max(variables(expand_derived(f)), default=1) for f in fs])


def is_tautology(f: Formula, n: int | None = None) -> DecisionReport:
    n = _dim_for([f], n)
    value, witness = pwl_min(compile(f, n))
    if value == 1:
        return DecisionReport(True)
    return DecisionReport(False, witness, value)


def are_equivalent(f: Formula, g: Formula, n: int | None = None) -> DecisionReport:
    n = _dim_for([f, g], n)
    dist, witness = sup_distance_witness(compile(f, n), compile(g, n))
    if dist == 0:
        return DecisionReport(True)
    return DecisionReport(False, witness, dist)


def semantic_consequence(theory: Sequence[Formula], f: Formula, n: int | None = None) -> DecisionReport:
    """Whether ``f`` takes value 1 wherever every member of ``theory`` does.

    Inside a cell each premise map is at most 1, so the premise region is a
    face of the cell and its vertices are the cell vertices where all premise
    maps equal 1.  The report's value is the conclusion's value at the witness.
    """
    n = _dim_for(list(theory) + [f], n)
    fs = [compile(t, n) for t in theory] + [compile(f, n)]
    best = None
    for cell, maps in overlay(fs):
        *prem, concl = maps
        for v in cell.vertices:
            if all(m(v) == 1 for m in prem):
                val = concl(v)
                key = (val, v)
                if best is None or key < best[0]:
                    best = (key, val, v)
    if best is None or best[1] == 1:
        return DecisionReport(True)
    return DecisionReport(False, best[2], best[1])


# -- audit and interchange ---------------------------------------------------


def audit(f: PWLFunc) -> list:
    """Problems found in the complex (empty list when it is valid)."""
    problems = []
    total = Fraction(0)
    seen: dict = {}
    for k, (cell, m) in enumerate(f.pieces):
        total += cell.volume()
        for v in cell.vertices:
            val = m(v)
            if not 0 <= val <= 1:
                problems.append(f"cell {k}: value {val} at {v} outside [0,1]")
            prev = seen.setdefault(v, val)
            if prev != val:
                problems.append(f"cell {k}: maps disagree at shared vertex {v}")
    if total != 1:
        problems.append(f"cell volumes sum to {total}, not 1")
    return problems


def grid_points(n: int, den: int):
    from itertools import product

    ticks = [Fraction(k, den) for k in range(den + 1)]
    return product(ticks, repeat=n)


def pwl_eval_grid(f: PWLFunc, den: int) -> dict:
    """Values at every grid point ``k/den``, filled cell by cell."""
    import math
    from itertools import product

    out = {}
    for cell, m in f.pieces:
        lo, hi = cell.bbox()
        ranges = [range(math.ceil(a * den), math.floor(b * den) + 1) for a, b in zip(lo, hi)]
        for ks in product(*ranges):
            if ks in out:
                continue
            p = tuple(Fraction(k, den) for k in ks)
            if cell.contains(p):
                out[ks] = m(p)
    return out


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dump_json(f: PWLFunc) -> dict:
    pieces = []
    for cell, m in f.pieces:
        ineqs = [[_q(Fraction(x)) for x in a] + [_q(Fraction(b))] for a, b in cell.non_cube_constraints()]
        pieces.append({"ineqs": ineqs, "affine": [_q(c) for c in m.coefficients] + [_q(m.constant)]})
    return {"dim": f.dim, "pieces": pieces}


def load_json(data: dict) -> PWLFunc:
    n = int(data["dim"])
    pieces = []
    for piece in data["pieces"]:
        cell = Polytope.cube(n)
        for row in piece["ineqs"]:
            vals = [Fraction(x) for x in row]
            cell = cell.cut(vals[:-1], vals[-1])
            if cell is None:
                raise ValueError("cell with empty interior")
        aff = [Fraction(x) for x in piece["affine"]]
        pieces.append((cell, AffineMap(tuple(aff[:-1]), aff[-1])))
    return PWLFunc(n, pieces)
