import itertools
from fractions import Fraction

import pytest

from toricsec.polyhedra import (
    RationalPolyhedron,
    integer_feasible,
    polytope_lattice_points,
    simplex_feasible,
)


def grid_scan_oracle(poly, box):
    """Naive bounding-box scan; the independent oracle for lattice points."""
    pts = []
    ranges = [range(lo, hi + 1) for lo, hi in box]
    for p in itertools.product(*ranges):
        if poly.contains(p):
            pts.append(p)
    return sorted(pts)


def box_poly(bounds):
    p = RationalPolyhedron(len(bounds))
    for i, (lo, hi) in enumerate(bounds):
        e = [0] * len(bounds)
        e[i] = 1
        p.add_ineq(tuple(e), lo)
        p.add_ineq(tuple(-x for x in e), -hi)
    return p


def test_unit_segment():
    p = box_poly([(0, 1)])
    assert polytope_lattice_points(p) == [(0,), (1,)]


def test_scaled_simplex_matches_grid_oracle():
    # 2 * standard 2-simplex: x, y >= 0, x + y <= 2 -> 6 points
    p = RationalPolyhedron(2)
    p.add_ineq((1, 0), 0)
    p.add_ineq((0, 1), 0)
    p.add_ineq((-1, -1), -2)
    pts = polytope_lattice_points(p)
    assert len(pts) == 6
    assert pts == grid_scan_oracle(p, [(-1, 3), (-1, 3)])


@pytest.mark.parametrize("tilt", [0, 1, -2])
def test_random_polytopes_match_grid_oracle(tilt):
    p = RationalPolyhedron(3)
    p.add_ineq((1, 0, 0), -2)
    p.add_ineq((0, 1, 0), -2)
    p.add_ineq((0, 0, 1), -2)
    p.add_ineq((-1, -1, -1), -4)
    p.add_ineq((1, tilt, 2), Fraction(-7, 2))
    assert polytope_lattice_points(p) == grid_scan_oracle(p, [(-3, 9)] * 3)


def test_lattice_points_with_equalities():
    p = RationalPolyhedron(3)
    p.add_eq((1, 1, 1), 2)
    for i in range(3):
        e = [0, 0, 0]
        e[i] = 1
        p.add_ineq(tuple(e), 0)
    pts = polytope_lattice_points(p)
    assert len(pts) == 6
    assert all(sum(x) == 2 and min(x) >= 0 for x in pts)


def test_unbounded_enumeration_rejected():
    p = RationalPolyhedron(2)
    p.add_ineq((1, 0), 0)
    p.add_ineq((0, 1), 0)
    with pytest.raises(ValueError):
        polytope_lattice_points(p)


def test_integer_feasible_dim0():
    p = RationalPolyhedron(0)
    ok, witness = integer_feasible(p)
    assert ok and witness == ()


def test_integer_feasible_2x_eq_1():
    p = RationalPolyhedron(1)
    p.add_ineq((2,), 1)
    p.add_ineq((-2,), -1)
    ok, _ = integer_feasible(p)
    assert not ok


def test_integer_feasible_cone_membership():
    # the H^4-cone system of the paper's worked fourfold at a fixed point
    p = RationalPolyhedron(0)
    a1, a2, a3 = 40, -7, 0
    assert a1 + 6 * a2 + a3 <= -2
    assert a2 + a3 <= -7
    assert a3 <= 1
    system = RationalPolyhedron(3)
    system.add_ineq((-1, -6, -1), 2)
    system.add_ineq((0, -1, -1), 7)
    system.add_ineq((0, 0, -1), -1)
    assert system.contains((a1, a2, a3))


def test_integer_feasible_unbounded_strip():
    # unbounded strip with no lattice points: 3x <= 3y + 1, 3x >= 3y + 1 - eps
    p = RationalPolyhedron(2)
    p.add_ineq((-3, 3), -1)
    p.add_ineq((3, -3), Fraction(1, 2))
    ok, _ = integer_feasible(p)
    assert not ok


def test_integer_feasible_unbounded_with_point():
    p = RationalPolyhedron(2)
    p.add_ineq((1, 0), 3)   # x >= 3, y free
    ok, w = integer_feasible(p)
    assert ok and w[0] >= 3


def test_integer_feasible_witness_valid():
    p = RationalPolyhedron(3)
    p.add_eq((1, 2, 3), 7)
    p.add_ineq((1, 0, 0), 0)
    p.add_ineq((0, 1, 0), 0)
    p.add_ineq((0, 0, 1), 0)
    ok, w = integer_feasible(p)
    assert ok and p.contains(w)


def test_vertices_of_square():
    p = box_poly([(0, 2), (0, 2)])
    assert p.vertices() == [(0, 0), (0, 2), (2, 0), (2, 2)]


def test_recession_generators():
    p = RationalPolyhedron(2)
    p.add_ineq((1, 0), 0)
    p.add_ineq((0, 1), 0)
    rays, lin = p.recession_generators()
    assert sorted(rays) == [(0, 1), (1, 0)]
    assert lin == []
    assert not p.is_bounded()


def test_simplex_feasible():
    # x0 + x1 = 2, x0 - x1 = 0 with x >= 0 -> (1, 1)
    w = simplex_feasible([(1, 1), (1, -1)], (2, 0), 2)
    assert w == (Fraction(1), Fraction(1))
    assert simplex_feasible([(1, 1)], (-1,), 2) is None
    # infeasible equality mix
    assert simplex_feasible([(1, 0), (1, 0)], (1, 2), 2) is None
