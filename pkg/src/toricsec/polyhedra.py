"""Rational polyhedra with exact lattice-point machinery.

A polyhedron is a system of inequalities a.x >= b (integer a, rational b),
optionally together with integer equalities.  Enumeration works by
Fourier-Motzkin projection followed by a project-and-lift scan, so every
bound is exact; no floating point anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd

from .intlin import (
    kernel_basis,
    mat,
    mat_vec,
    primitive,
    rank,
    solve_linear_diophantine,
    unimodular_with_last_column,
)

Ineq = tuple[tuple[int, ...], Fraction]  # coeffs . x >= rhs


def _norm_ineq(coeffs, rhs) -> Ineq:
    coeffs = tuple(int(c) for c in coeffs)
    rhs = Fraction(rhs)
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        rhs = rhs / g
    return coeffs, rhs


def _dedupe(ineqs: list[Ineq]) -> list[Ineq]:
    best: dict[tuple[int, ...], Fraction] = {}
    for coeffs, rhs in ineqs:
        if coeffs in best:
            if rhs > best[coeffs]:
                best[coeffs] = rhs
        else:
            best[coeffs] = rhs
    return [(c, r) for c, r in best.items()]


def fm_eliminate_last(ineqs: list[Ineq], nvars: int) -> list[Ineq]:
    """Project out the last variable by Fourier-Motzkin."""
    zero, lower, upper = [], [], []
    for coeffs, rhs in ineqs:
        c = coeffs[nvars - 1]
        if c == 0:
            zero.append((coeffs[: nvars - 1], rhs))
        elif c > 0:
            lower.append((coeffs, rhs))
        else:
            upper.append((coeffs, rhs))
    out = list(zero)
    for (lc, lr) in lower:
        for (uc, ur) in upper:
            a, b = lc[nvars - 1], -uc[nvars - 1]
            coeffs = tuple(b * lc[i] + a * uc[i] for i in range(nvars - 1))
            out.append(_norm_ineq(coeffs, b * lr + a * ur))
    return _dedupe(out)


def _interval_1d(ineqs: list[Ineq]):
    """Bounds (lo, hi) for a single variable; None means unbounded on that side."""
    lo, hi = None, None
    for (c,), rhs in ineqs:
        if c == 0:
            if rhs > 0:
                return Fraction(1), Fraction(0)  # empty
            continue
        bound = Fraction(rhs, c)
        if c > 0:
            lo = bound if lo is None or bound > lo else lo
        else:
            hi = bound if hi is None or bound < hi else hi
    return lo, hi


def _feasible_0d(ineqs: list[Ineq]) -> bool:
    return all(rhs <= 0 for _, rhs in ineqs)


class _Projections:
    """FM projection tower: level k constrains variables x_0..x_{k-1}."""

    def __init__(self, ineqs: list[Ineq], nvars: int):
        self.nvars = nvars
        levels = [None] * (nvars + 1)
        levels[nvars] = _dedupe([_norm_ineq(c, r) for c, r in ineqs])
        for k in range(nvars, 0, -1):
            levels[k - 1] = fm_eliminate_last(levels[k], k)
        self.levels = levels

    def feasible_real(self) -> bool:
        return _feasible_0d(self.levels[0])

    def var_interval(self, prefix: tuple[int, ...]):
        """Exact interval for x_k given integer values of x_0..x_{k-1}."""
        k = len(prefix)
        reduced = []
        for coeffs, rhs in self.levels[k + 1]:
            rem = rhs - sum(c * v for c, v in zip(coeffs, prefix))
            reduced.append(((coeffs[k],), rem))
        return _interval_1d(reduced)


def _int_range(lo, hi):
    if lo is not None and hi is not None and lo > hi:
        return None
    a = ceil(lo) if lo is not None else None
    b = floor(hi) if hi is not None else None
    return a, b


def enumerate_lattice(ineqs: list[Ineq], nvars: int, limit: int | None = None):
    """All integer points of {x : ineqs}, lexicographically.

    The system must be bounded; unbounded directions make the scan diverge,
    so callers check boundedness first.
    """
    if nvars == 0:
        return [()] if _feasible_0d(_dedupe([_norm_ineq(c, r) for c, r in ineqs])) else []
    proj = _Projections(ineqs, nvars)
    if not proj.feasible_real():
        return []
    out = []

    def rec(prefix):
        k = len(prefix)
        lo, hi = proj.var_interval(prefix)
        rng = _int_range(lo, hi)
        if rng is None:
            return
        a, b = rng
        if a is None or b is None:
            raise ValueError("unbounded enumeration")
        for v in range(a, b + 1):
            nxt = prefix + (v,)
            if k + 1 == nvars:
                out.append(nxt)
            else:
                rec(nxt)

    rec(())
    if limit is not None and len(out) > limit:
        raise ValueError("too many lattice points")
    return out


def _first_lattice_point(ineqs: list[Ineq], nvars: int):
    """One integer point of a bounded system, or None."""
    if nvars == 0:
        return () if _feasible_0d(_dedupe([_norm_ineq(c, r) for c, r in ineqs])) else None
    proj = _Projections(ineqs, nvars)
    if not proj.feasible_real():
        return None

    def rec(prefix):
        k = len(prefix)
        lo, hi = proj.var_interval(prefix)
        rng = _int_range(lo, hi)
        if rng is None:
            return None
        a, b = rng
        if a is None or b is None:
            raise ValueError("unbounded search")
        for v in range(a, b + 1):
            nxt = prefix + (v,)
            if k + 1 == nvars:
                return nxt
            got = rec(nxt)
            if got is not None:
                return got
        return None

    return rec(())


def _cone_lineality(ineqs: list[Ineq], nvars: int):
    rows = mat([c for c, _ in ineqs]) if ineqs else mat([])
    if not ineqs:
        return [tuple(1 if i == j else 0 for j in range(nvars)) for i in range(nvars)]
    return kernel_basis(rows)


def _cone_ray(ineqs: list[Ineq], nvars: int):
    """A primitive nonzero integer vector w with coeff.w >= 0 for all rows,
    assuming the cone has no lineality.  None when the cone is {0}."""
    rows = [c for c, _ in _dedupe([_norm_ineq(c, Fraction(0)) for c, _ in ineqs])]
    if nvars == 0:
        return None
    if not rows:
        return tuple(1 if i == 0 else 0 for i in range(nvars))
    if nvars == 1:
        for cand in ((1,), (-1,)):
            if all(r[0] * cand[0] >= 0 for r in rows):
                return cand
        return None
    for subset in itertools.combinations(range(len(rows)), nvars - 1):
        sub = mat([rows[i] for i in subset])
        ker = kernel_basis(sub)
        if len(ker) != 1:
            continue
        v = primitive(ker[0])
        for cand in (v, tuple(-x for x in v)):
            if all(sum(c * x for c, x in zip(row, cand)) >= 0 for row in rows):
                return cand
    return None


@dataclass
class RationalPolyhedron:
    """{x in R^n : A x >= b, E x = f} with exact data.

    Vertex and recession data are computed on demand and cached.
    """

    nvars: int
    ineqs: list[Ineq] = field(default_factory=list)
    eqs: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    _vertices: list | None = field(default=None, repr=False)
    _recession: list | None = field(default=None, repr=False)

    @classmethod
    def from_ineqs(cls, rows, nvars: int) -> "RationalPolyhedron":
        return cls(nvars, [_norm_ineq(c, r) for c, r in rows])

    def add_ineq(self, coeffs, rhs):
        self.ineqs.append(_norm_ineq(coeffs, rhs))
        self._vertices = self._recession = None

    def add_eq(self, coeffs, rhs: int):
        self.eqs.append((tuple(int(c) for c in coeffs), int(rhs)))
        self._vertices = self._recession = None

    def contains(self, point) -> bool:
        ok = all(sum(c * x for c, x in zip(coeffs, point)) >= rhs
                 for coeffs, rhs in self.ineqs)
        return ok and all(sum(c * x for c, x in zip(coeffs, point)) == rhs
                          for coeffs, rhs in self.eqs)

    def _all_rows(self):
        rows = [(c, Fraction(r)) for c, r in self.ineqs]
        for c, r in self.eqs:
            rows.append((c, Fraction(r)))
            rows.append((tuple(-x for x in c), Fraction(-r)))
        return rows

    def vertices(self):
        """Vertices by exhaustive tight-subset search; exact rationals."""
        if self._vertices is not None:
            return self._vertices
        rows = self._all_rows()
        n = self.nvars
        seen = set()
        verts = []
        if n == 0:
            self._vertices = [()] if _feasible_0d(rows) else []
            return self._vertices
        for subset in itertools.combinations(range(len(rows)), n):
            a = [rows[i][0] for i in subset]
            if rank(mat(a)) < n:
                continue
            sol = _solve_square_fraction(a, [rows[i][1] for i in subset])
            if sol is None or sol in seen:
                continue
            if all(sum(c * x for c, x in zip(coeffs, sol)) >= rhs for coeffs, rhs in rows):
                seen.add(sol)
                verts.append(sol)
        self._vertices = sorted(verts)
        return self._vertices

    def recession_generators(self):
        """Primitive integer generators (rays then lineality basis)."""
        if self._recession is not None:
            return self._recession
        hom = [(c, Fraction(0)) for c, _ in self._all_rows()]
        lin = _cone_lineality(hom, self.nvars)
        rays = []
        if not lin:
            rows = [c for c, _ in hom]
            n = self.nvars
            seen = set()
            if n == 1:
                w = _cone_ray(hom, 1)
                if w:
                    rays.append(w)
            else:
                for subset in itertools.combinations(range(len(rows)), n - 1):
                    ker = kernel_basis(mat([rows[i] for i in subset]))
                    if len(ker) != 1:
                        continue
                    v = primitive(ker[0])
                    for cand in (v, tuple(-x for x in v)):
                        if cand not in seen and all(
                                sum(c * x for c, x in zip(row, cand)) >= 0 for row in rows):
                            seen.add(cand)
                            rays.append(cand)
        self._recession = (sorted(rays), [tuple(v) for v in lin])
        return self._recession

    def is_bounded(self) -> bool:
        rays, lin = self.recession_generators()
        return not rays and not lin


def _solve_square_fraction(a, b):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col]
        m[col] = [x / inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return tuple(m[i][n] for i in range(n))


def _reduce_equalities(poly: RationalPolyhedron):
    """Substitute out integer equalities.

    Returns (ineqs, nvars, lift) where lift maps free integer variables back
    to the original coordinates, or None when the equalities have no integer
    solution.
    """
    if not poly.eqs:
        n = poly.nvars
        return list(poly.ineqs), n, lambda t: tuple(t)
    a = mat([c for c, _ in poly.eqs])
    b = [r for _, r in poly.eqs]
    x0, kernel = solve_linear_diophantine(a, b)
    if x0 is None:
        return None
    k = len(kernel)
    new_ineqs = []
    for coeffs, rhs in poly.ineqs:
        base = sum(c * x for c, x in zip(coeffs, x0))
        row = tuple(sum(c * kv[i] for i, c in enumerate(coeffs)) for kv in kernel)
        new_ineqs.append(_norm_ineq(row, rhs - base))

    def lift(t):
        x = list(x0)
        for kv, tv in zip(kernel, t):
            for i in range(len(x)):
                x[i] += kv[i] * tv
        return tuple(x)

    return new_ineqs, k, lift


def polytope_lattice_points(poly: RationalPolyhedron) -> list[tuple[int, ...]]:
    """Exactly the integer points of a bounded polyhedron, lex order."""
    red = _reduce_equalities(poly)
    if red is None:
        return []
    ineqs, n, lift = red
    proj = _Projections(ineqs, n)
    if not proj.feasible_real():
        return []
    # boundedness of the reduced system
    probe = RationalPolyhedron(n, list(ineqs))
    if not probe.is_bounded():
        raise ValueError("polyhedron is unbounded; lattice enumeration refused")
    pts = enumerate_lattice(ineqs, n)
    return sorted(lift(t) for t in pts)


def integer_feasible(poly: RationalPolyhedron):
    """(feasible, witness) for arbitrary rational polyhedra.

    Unbounded instances are reduced one lattice direction at a time:
    lineality directions and recession rays are rotated to the last
    coordinate by a unimodular change of basis and projected out, which
    preserves integer feasibility exactly.
    """
    red = _reduce_equalities(poly)
    if red is None:
        return False, None
    ineqs, n, lift = red
    got = _integer_feasible_ineqs(ineqs, n)
    if got is None:
        return False, None
    return True, lift(got)


def _integer_feasible_ineqs(ineqs: list[Ineq], n: int):
    ineqs = _dedupe([_norm_ineq(c, r) for c, r in ineqs])
    if n == 0:
        return () if _feasible_0d(ineqs) else None
    hom = [(c, Fraction(0)) for c, _ in ineqs]
    lin = _cone_lineality(hom, n)
    if lin:
        w = primitive(lin[0])
        return _eliminate_direction(ineqs, n, w)
    ray = _cone_ray(ineqs, n)
    if ray is not None:
        return _eliminate_direction(ineqs, n, ray)
    return _first_lattice_point(ineqs, n)


def _eliminate_direction(ineqs: list[Ineq], n: int, w):
    """Substitute x = U s (U unimodular, last column w) and drop s_n.

    All coefficients of s_n are >= 0, so its constraints are lower bounds;
    an integer value always exists, making the projection exact over Z.
    """
    u = unimodular_with_last_column(w)
    transformed = []
    for coeffs, rhs in ineqs:
        new = tuple(sum(coeffs[i] * u[i][j] for i in range(n)) for j in range(n))
        transformed.append((new, rhs))
    assert all(row[n - 1] >= 0 for row, _ in transformed), "direction is not recessive"
    reduced = [ (row[: n - 1], rhs) for row, rhs in transformed if row[n - 1] == 0 ]
    got = _integer_feasible_ineqs(reduced, n - 1)
    if got is None:
        return None
    # lift: choose the smallest integer s_n satisfying the lower bounds
    lo = None
    for row, rhs in transformed:
        c = row[n - 1]
        if c > 0:
            rem = rhs - sum(a * b for a, b in zip(row[: n - 1], got))
            bound = Fraction(rem, c)
            lo = bound if lo is None or bound > lo else lo
    s_n = ceil(lo) if lo is not None else 0
    s = tuple(got) + (s_n,)
    return mat_vec(u, s)


class ParametricIntegerFeasibility:
    """Repeated integer feasibility over a fixed row structure.

    The Fourier-Motzkin tower depends only on the coefficient rows, so it
    is built once with multiplier tracking; each query just instantiates
    the right-hand sides.  Queries whose projections go unbounded fall
    back to the generic routine.
    """

    def __init__(self, rows, nvars: int):
        self.nvars = nvars
        self.base_rows = [tuple(int(c) for c in r) for r in rows]
        m = len(self.base_rows)
        # level k holds constraints on x_0..x_{k-1}: (coeffs, multipliers)
        start = [(r, tuple(1 if i == j else 0 for j in range(m)))
                 for i, r in enumerate(self.base_rows)]
        levels = [None] * (nvars + 1)
        levels[nvars] = self._dedupe(start)
        for k in range(nvars, 0, -1):
            levels[k - 1] = self._eliminate(levels[k], k)
        self.levels = levels

    @staticmethod
    def _dedupe(rows):
        seen = {}
        for coeffs, mult in rows:
            seen.setdefault((coeffs, mult), None)
        return [k for k in seen]

    @staticmethod
    def _eliminate(rows, nvars):
        zero, lower, upper = [], [], []
        for coeffs, mult in rows:
            c = coeffs[nvars - 1]
            if c == 0:
                zero.append((coeffs[: nvars - 1], mult))
            elif c > 0:
                lower.append((coeffs, mult))
            else:
                upper.append((coeffs, mult))
        out = list(zero)
        for lc, lm in lower:
            for uc, um in upper:
                a, b = lc[nvars - 1], -uc[nvars - 1]
                coeffs = tuple(b * lc[i] + a * uc[i] for i in range(nvars - 1))
                mult = tuple(b * x + a * y for x, y in zip(lm, um))
                g = 0
                for v in coeffs + mult:
                    g = gcd(g, v)
                if g > 1:
                    coeffs = tuple(v // g for v in coeffs)
                    mult = tuple(v // g for v in mult)
                out.append((coeffs, mult))
        return ParametricIntegerFeasibility._dedupe(out)

    def query(self, rhs) -> bool:
        """Is there an integer point with base_rows . x >= rhs?"""
        rhs = [Fraction(x) for x in rhs]

        def level_rhs(entry):
            coeffs, mult = entry
            return sum(m * r for m, r in zip(mult, rhs))

        for coeffs, mult in self.levels[0]:
            if level_rhs((coeffs, mult)) > 0:
                return False

        def rec(prefix):
            k = len(prefix)
            lo, hi = None, None
            for coeffs, mult in self.levels[k + 1]:
                c = coeffs[k]
                rem = level_rhs((coeffs, mult)) - sum(
                    ci * v for ci, v in zip(coeffs, prefix))
                if c == 0:
                    if rem > 0:
                        return False
                    continue
                bound = Fraction(rem, c)
                if c > 0:
                    lo = bound if lo is None or bound > lo else lo
                else:
                    hi = bound if hi is None or bound < hi else hi
            if lo is None or hi is None:
                raise _UnboundedQuery()
            a, b = ceil(lo), floor(hi)
            for v in range(a, b + 1):
                nxt = prefix + (v,)
                if k + 1 == self.nvars:
                    return True
                if rec(nxt):
                    return True
            return False

        if self.nvars == 0:
            return True
        try:
            return rec(())
        except _UnboundedQuery:
            poly = RationalPolyhedron(self.nvars,
                                      [(r, Fraction(b)) for r, b in
                                       zip(self.base_rows, rhs)])
            ok, _ = integer_feasible(poly)
            return ok


class _UnboundedQuery(Exception):
    pass


def simplex_feasible(eq_rows, rhs, nvars: int):
    """Phase-1 simplex: does {x >= 0 : E x = f} have a rational point?

    Bland's rule, exact Fractions.  Returns a witness tuple or None.
    """
    m = len(eq_rows)
    rows = [list(map(Fraction, r)) for r in eq_rows]
    f = [Fraction(x) for x in rhs]
    for i in range(m):
        if f[i] < 0:
            rows[i] = [-x for x in rows[i]]
            f[i] = -f[i]
    # tableau with artificial basis
    tab = [rows[i] + [Fraction(1 if j == i else 0) for j in range(m)] + [f[i]]
           for i in range(m)]
    basis = [nvars + i for i in range(m)]
    cost = [Fraction(0)] * nvars + [Fraction(1)] * m + [Fraction(0)]
    for i in range(m):
        for j in range(nvars + m + 1):
            cost[j] -= tab[i][j]
    total = nvars + m
    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][total] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break  # unbounded phase-1 cannot happen, guard anyway
        _, piv = best
        pv = tab[piv][enter]
        tab[piv] = [x / pv for x in tab[piv]]
        for i in range(m):
            if i != piv and tab[i][enter] != 0:
                factor = tab[i][enter]
                tab[i] = [x - factor * y for x, y in zip(tab[i], tab[piv])]
        if cost[enter] != 0:
            factor = cost[enter]
            cost = [x - factor * y for x, y in zip(cost, tab[piv])]
        basis[piv] = enter
    objective = -cost[total]
    if objective != 0:
        return None
    x = [Fraction(0)] * nvars
    for i, b in enumerate(basis):
        if b < nvars:
            x[b] = tab[i][total]
        elif tab[i][total] != 0:
            return None  # artificial stuck at positive level
    return tuple(x)
