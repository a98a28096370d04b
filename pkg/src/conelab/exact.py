"""Exact rational linear algebra over `fractions.Fraction`.

Small dense problems only (dims well under 100): reduced row echelon form,
rank, null spaces, linear solves, and a Bland-rule phase-I simplex for
feasibility certificates.  All polyhedral cone reasoning in this package
goes through these routines so that verdicts on polyhedral fixtures are
exact, not floating point.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

Row = list[Fraction]
Matrix = list[Row]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(mat: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(mat: Matrix) -> int:
    if not mat:
        return 0
    return len(rref(mat)[1])


def null_space(mat: Matrix) -> list[Row]:
    """Basis of {x : mat @ x = 0}."""
    if not mat:
        return []
    cols = len(mat[0])
    red, pivots = rref(mat)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * cols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -red[r][f]
        basis.append(vec)
    return basis


def solve(mat: Matrix, rhs: Row) -> Row | None:
    """One solution of mat @ x = rhs, or None if inconsistent."""
    aug = [row[:] + [b] for row, b in zip(mat, rhs)]
    red, pivots = rref(aug)
    cols = len(mat[0])
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, p in enumerate(pivots):
        x[p] = red[r][cols]
    return x


def mat_vec(mat: Matrix, vec: Row) -> Row:
    return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in mat]


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def primitive(vec: Sequence[Fraction]) -> Row:
    """Scale a rational vector to coprime integers with positive leading entry."""
    v = [Fraction(x) for x in vec]
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        return v
    if lead < 0:
        v = [-x for x in v]
    from math import gcd, lcm

    den = lcm(*(x.denominator for x in v))
    ints = [x * den for x in v]
    g = 0
    for x in ints:
        g = gcd(g, int(x))
    return [x / g for x in ints]


def feasible_nonneg(mat: Matrix, rhs: Row) -> Row | None:
    """Find x >= 0 with mat @ x = rhs, exactly, or None if infeasible.

    Phase-I simplex with Bland's rule (terminates, no tolerances).
    """
    m = len(mat)
    if m == 0:
        return []
    n = len(mat[0])
    # Tableau with artificial variables; make rhs nonnegative first.
    a = [row[:] for row in mat]
    b = rhs[:]
    for i in range(m):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]
    # Columns: n structural + m artificial + rhs.
    tab = [a[i] + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [b[i]]
           for i in range(m)]
    basis = list(range(n, n + m))
    # Objective: minimize the sum of artificials.  Reduced-cost row, priced out.
    cost = [Fraction(0)] * n + [Fraction(1)] * m + [Fraction(0)]
    for row in tab:
        cost = [c - t for c, t in zip(cost, row)]
    while True:
        enter = next((j for j in range(n + m) if cost[j] < 0), None)  # Bland
        if enter is None:
            break
        ratios = [(tab[i][-1] / tab[i][enter], basis[i], i)
                  for i in range(m) if tab[i][enter] > 0]
        if not ratios:
            break  # phase-I is bounded below by 0; guard anyway
        _, _, leave = min(ratios, key=lambda t: (t[0], t[1]))
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, tab[leave])]
        basis[leave] = enter
    if -cost[-1] != 0:  # residual artificial mass: infeasible
        return None
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    return x


def strictly_positive_in_span(basis_vecs: list[Row]) -> Row | None:
    """Find a vector with all entries >= 1 in span(basis_vecs), or None.

    Used to decide whether a subspace meets the open positive orthant.
    """
    if not basis_vecs:
        return None
    n = len(basis_vecs[0])
    k = len(basis_vecs)
    # x = B^T c, x_i = 1 + s_i with s_i >= 0, c free -> c = cp - cm.
    # Columns: cp (k), cm (k), s (n).  Rows: n equations.
    mat: Matrix = []
    for i in range(n):
        row = [basis_vecs[j][i] for j in range(k)]
        row += [-basis_vecs[j][i] for j in range(k)]
        row += [Fraction(-1) if t == i else Fraction(0) for t in range(n)]
        mat.append(row)
    rhs = [Fraction(1)] * n
    sol = feasible_nonneg(mat, rhs)
    if sol is None:
        return None
    coeffs = [sol[j] - sol[k + j] for j in range(k)]
    return [dot([bv[i] for bv in basis_vecs], coeffs) for i in range(n)]


class PolyhedralData:
    """Exact V-description (rays) and derived H-description (facets) of a
    pointed full-dimensional polyhedral cone."""

    def __init__(self, rays: Sequence[Sequence]):
        self.rays: Matrix = to_fraction_matrix(rays)
        if not self.rays:
            raise ValueError("empty generator list")
        self.dim = len(self.rays[0])
        if any(all(x == 0 for x in r) for r in self.rays):
            raise ValueError("zero generator")
        self._facets: Matrix | None = None
        self._extremal: list[int] | None = None

    @property
    def full_dimensional(self) -> bool:
        return rank(self.rays) == self.dim

    def is_pointed(self) -> bool:
        """No nonzero x with x and -x both in the cone.

        Pointed iff 0 is not a nontrivial nonneg combination of the rays,
        i.e. the only solution of sum(l_i r_i) = 0, l >= 0, sum(l) = 1 is none.
        """
        mat = [[self.rays[j][i] for j in range(len(self.rays))] for i in range(self.dim)]
        mat.append([Fraction(1)] * len(self.rays))
        rhs = [Fraction(0)] * self.dim + [Fraction(1)]
        return feasible_nonneg(mat, rhs) is None

    def member(self, x: Sequence) -> bool:
        """Exact membership: x = sum(l_i r_i), l >= 0."""
        xf = [Fraction(v) for v in x]
        mat = [[self.rays[j][i] for j in range(len(self.rays))] for i in range(self.dim)]
        return feasible_nonneg(mat, xf) is not None

    def member_by_facets(self, x: Sequence) -> bool:
        """Independent membership route: all facet inequalities hold."""
        xf = [Fraction(v) for v in x]
        return all(dot(n, xf) >= 0 for n in self.facets())

    def facets(self) -> Matrix:
        """Primitive inward facet normals, enumerated from (dim-1)-subsets."""
        if self._facets is not None:
            return self._facets
        if not self.full_dimensional:
            raise ValueError("facet enumeration requires a full-dimensional cone")
        d = self.dim
        seen: set[tuple] = set()
        normals: Matrix = []
        for subset in itertools.combinations(range(len(self.rays)), d - 1):
            sub = [self.rays[i] for i in subset]
            ns = null_space(sub)
            if len(ns) != 1:
                continue
            n = primitive(ns[0])
            vals = [dot(n, r) for r in self.rays]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                n = [-x for x in n]
                vals = [-v for v in vals]
            else:
                continue
            tight = [self.rays[i] for i, v in enumerate(vals) if v == 0]
            if rank(tight) != d - 1:
                continue
            key = tuple(n)
            if key not in seen:
                seen.add(key)
                normals.append(n)
        self._facets = normals
        return normals

    def extremal_ray_indices(self) -> list[int]:
        """Indices of generators spanning extremal rays (one per ray)."""
        if self._extremal is not None:
            return self._extremal
        out: list[int] = []
        reps: list[Row] = []
        for i, r in enumerate(self.rays):
            if any(rank([r, p]) == 1 for p in reps):
                continue
            others = [self.rays[j] for j in range(len(self.rays))
                      if j != i and rank([self.rays[j], r]) == 2]
            if not others:
                out.append(i)
                reps.append(r)
                continue
            mat = [[others[j][c] for j in range(len(others))] for c in range(self.dim)]
            if feasible_nonneg(mat, r) is None:
                out.append(i)
                reps.append(r)
        self._extremal = out
        return out

    def face_span_dimension(self, x: Sequence) -> int:
        """dim span(Face(x)): null space of the facet normals tight at x."""
        xf = [Fraction(v) for v in x]
        if not self.member(xf):
            raise ValueError("x is not a member of the cone")
        tight = [n for n in self.facets() if dot(n, xf) == 0]
        if not tight:
            return self.dim
        return self.dim - rank(tight)
