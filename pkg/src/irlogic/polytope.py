"""Exact rational polytopes inside the unit cube.

A :class:`Polytope` keeps both descriptions: the inequalities ``a.x <= b``
and the vertex list, with the set of constraints tight at each vertex.
Cutting by a halfspace is one double-description step; two vertices are
joined by an edge exactly when their common tight constraints have rank
``dim - 1``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Sequence

Vector = tuple


def dot(a: Sequence, x: Sequence):
    return sum((ai * xi for ai, xi in zip(a, x)), Fraction(0))


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over the rationals (Gaussian elimination)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    r = 0
    cols = len(m[0])
    for c in range(cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                k = m[i][c] / m[r][c]
                m[i] = [x - k * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                k = m[i][c] / m[c][c]
                m[i] = [x - k * y for x, y in zip(m[i], m[c])]
    return out


def normalize_halfspace(a: Sequence, b) -> tuple:
    """Scale ``a.x <= b`` to primitive integer coefficients (direction kept)."""
    vals = [Fraction(x) for x in a] + [Fraction(b)]
    den = reduce(math.lcm, (v.denominator for v in vals), 1)
    ints = [int(v * den) for v in vals]
    g = reduce(math.gcd, (abs(i) for i in ints), 0) or 1
    ints = [i // g for i in ints]
    return tuple(ints[:-1]), ints[-1]


class Polytope:
    __slots__ = ("dim", "constraints", "vertices", "tight", "_rank_cache")

    def __init__(self, dim: int, constraints: list, vertices: list, tight: list):
        self.dim = dim
        self.constraints = constraints  # list of (a tuple of ints, b int)
        self.vertices = vertices  # list of tuples of Fraction
        self.tight = tight  # list of frozensets of constraint indices
        self._rank_cache = {}

    @classmethod
    def cube(cls, n: int) -> "Polytope":
        cons = []
        for i in range(n):
            e = tuple(1 if j == i else 0 for j in range(n))
            cons.append((tuple(-x for x in e), 0))
            cons.append((e, 1))
        verts = [tuple(Fraction(c) for c in bits) for bits in product((0, 1), repeat=n)]
        tight = [frozenset(2 * i + int(v[i]) for i in range(n)) for v in verts]
        return cls(n, cons, verts, tight)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, constraints={len(self.constraints)}, vertices={len(self.vertices)})"

    def _face_rank(self, z: frozenset) -> int:
        hit = self._rank_cache.get(z)
        if hit is None:
            hit = rank([self.constraints[i][0] for i in z])
            self._rank_cache[z] = hit
        return hit

    def adjacent(self, i: int, j: int) -> bool:
        z = self.tight[i] & self.tight[j]
        if len(z) < self.dim - 1:
            return False
        return self._face_rank(z) == self.dim - 1

    def cut(self, a: Sequence, b) -> "Polytope | None":
        """Intersection with ``a.x <= b``; None when it has empty interior."""
        a, b = normalize_halfspace(a, b)
        if not any(a):
            return self if b >= 0 else None
        s = [dot(a, v) - b for v in self.vertices]
        if all(x <= 0 for x in s):
            return self
        if all(x >= 0 for x in s):
            return None
        new = len(self.constraints)
        cons = self.constraints + [(a, b)]
        verts, tight = [], []
        for v, t, x in zip(self.vertices, self.tight, s):
            if x <= 0:
                verts.append(v)
                tight.append(t | {new} if x == 0 else t)
        neg = [i for i, x in enumerate(s) if x < 0]
        pos = [i for i, x in enumerate(s) if x > 0]
        for i in neg:
            for j in pos:
                if not self.adjacent(i, j):
                    continue
                u, w = self.vertices[i], self.vertices[j]
                lam = s[i] / (s[i] - s[j])
                verts.append(tuple(ui + lam * (wi - ui) for ui, wi in zip(u, w)))
                tight.append((self.tight[i] & self.tight[j]) | {new})
        return Polytope._pruned(self.dim, cons, verts, tight)

    @staticmethod
    def _pruned(dim, cons, verts, tight):
        # a facet has at least dim vertices; anything tight less often is redundant
        counts = [0] * len(cons)
        for t in tight:
            for c in t:
                counts[c] += 1
        keep = [c for c in range(len(cons)) if counts[c] >= dim]
        remap = {c: k for k, c in enumerate(keep)}
        return Polytope(
            dim,
            [cons[c] for c in keep],
            verts,
            [frozenset(remap[c] for c in t if c in remap) for t in tight],
        )

    def cut_all(self, halfspaces) -> "Polytope | None":
        p = self
        for a, b in halfspaces:
            p = p.cut(a, b)
            if p is None:
                return None
        return p

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) <= b for a, b in self.constraints)

    def bbox(self):
        lo = tuple(min(v[i] for v in self.vertices) for i in range(self.dim))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(self.dim))
        return lo, hi

    def non_cube_constraints(self):
        out = []
        for a, b in self.constraints:
            nz = [i for i, x in enumerate(a) if x]
            if len(nz) == 1 and ((a[nz[0]] == -1 and b == 0) or (a[nz[0]] == 1 and b == 1)):
                continue
            out.append((a, b))
        return out

    def minimize(self, c: Sequence, c0=0):
        """``(value, vertex)`` of min ``c.x + c0``, lexicographically first vertex on ties."""
        best = None
        for v in self.vertices:
            val = dot(c, v) + c0
            if best is None or (val, v) < best:
                best = (val, v)
        return best

    def _affine_dim(self, idx: list) -> int:
        if not idx:
            return -1
        base = self.vertices[idx[0]]
        return rank([[x - y for x, y in zip(self.vertices[i], base)] for i in idx[1:]])

    def _triangulate(self, idx: list, d: int) -> list:
        if d == 0:
            return [[idx[0]]]
        v0 = min(idx, key=lambda i: self.vertices[i])
        seen = set()
        out = []
        members = set(idx)
        for c in range(len(self.constraints)):
            face = sorted(i for i in members if c in self.tight[i])
            key = tuple(face)
            if v0 in face or key in seen or len(face) < d:
                continue
            seen.add(key)
            if self._affine_dim(face) != d - 1:
                continue
            for simplex in self._triangulate(face, d - 1):
                out.append([v0] + simplex)
        return out

    def volume(self) -> Fraction:
        n = self.dim
        total = Fraction(0)
        for simplex in self._triangulate(list(range(len(self.vertices))), n):
            base = self.vertices[simplex[0]]
            rows = [[x - y for x, y in zip(self.vertices[i], base)] for i in simplex[1:]]
            total += abs(det(rows))
        return total / math.factorial(n)
