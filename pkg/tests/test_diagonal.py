import pytest

from toricsec.diagonal import (
    DiagonalError,
    cell_sets,
    check_bidegrees,
    check_dd_zero,
    derivative_complex,
    diagonal_resolution_verdict,
    fiber_exactness_check,
    restrict_cells,
    sign_solve,
    superpotential,
)
from toricsec.fans import deg_and_pic
from toricsec.quiver import QuiverOfSections, Arrow, covering_quiver_on_y

from conftest import make_fan

E1_BUNDLES = [(0, 0, 0), (0, 1, 1), (0, 2, 2), (0, 3, 3), (1, 0, 0), (1, 0, 1),
              (1, 1, 1), (1, 1, 2), (1, 2, 2), (1, 2, 3), (1, 3, 3)]


@pytest.fixture(scope="module")
def e1_signed():
    fan = make_fan("E1")
    pic = deg_and_pic(fan, (4, 5, 6))
    qy = covering_quiver_on_y(fan, pic, E1_BUNDLES)
    data = cell_sets(qy, 4)
    rest = restrict_cells(data, rho_tot=pic.n_rays)
    cx = derivative_complex(rest, qy, pic.n_rays, E1_BUNDLES)
    signed = sign_solve(cx)
    return fan, pic, qy, data, signed


def test_superpotential_p1():
    fan = make_fan("P1")
    pic = deg_and_pic(fan)
    qy = covering_quiver_on_y(fan, pic, [(0,), (1,)])
    cycles = superpotential(qy)
    # each cycle uses x0, x1, x_tot exactly once, through both arrows
    assert cycles
    for c in cycles:
        total = [0, 0, 0]
        for idx in c:
            for i, x in enumerate(qy.arrows[idx].div):
                total[i] += x
        assert total == [1, 1, 1]


def test_superpotential_requires_back_arrows():
    q = QuiverOfSections(((0,), (1,)), (Arrow(0, 1, (1, 0, 0)),), True, 3)
    assert superpotential(q) == ()
    with pytest.raises(DiagonalError):
        cell_sets(q, 2)


def test_e1_cell_cardinalities(e1_signed):
    _, _, qy, data, _ = e1_signed
    sizes = [len(l) for l in data.levels]
    assert sizes == [11, 46, 83, 83, 46, 11]
    # duality |Gamma'_k| = |Gamma'_{5-k}|
    assert sizes == sizes[::-1]


def test_e1_restricted_ranks(e1_signed):
    fan, pic, qy, data, signed = e1_signed
    assert signed.ranks == (11, 39, 52, 31, 7)


def test_j1_restricted_counts():
    fan = make_fan("J1")
    pic = deg_and_pic(fan, (2, 5, 6, 7))
    pic_rows = [
        [0, 0, 1, 1, 2, 2, 2, 3, 2, 3, 3, 3, 3, 3, 4, 3, 4],
        [0, 0, 0, 1, 1, 2, 1, 2, 2, 1, 2, 3, 2, 3, 2, 3, 2],
        [0, 0, 1, 1, 1, 1, 2, 1, 2, 2, 2, 1, 2, 2, 2, 2, 2],
        [0, 1, 1, 1, 1, 1, 2, 1, 2, 2, 1, 1, 2, 1, 1, 2, 2]]
    bundles = list(zip(*pic_rows))
    qy = covering_quiver_on_y(fan, pic, bundles)
    rest = restrict_cells(cell_sets(qy, 4), rho_tot=pic.n_rays)
    assert [len(l) for l in rest] == [17, 50, 59, 38, 12]


def test_e1_sign_solution_squares_to_zero(e1_signed):
    _, pic, _, _, signed = e1_signed
    assert signed is not None
    assert check_dd_zero(signed)
    assert check_bidegrees(signed, pic)


def test_d1_shape(e1_signed):
    _, _, qy, _, signed = e1_signed
    d1 = signed.matrices[0]
    arrows = [a for a in qy.arrows if a.div[-1] == 0]
    for col, arrow in enumerate(arrows):
        terms_head = d1[(arrow.head, col)]
        terms_tail = d1[(arrow.tail, col)]
        assert terms_head == [(1, arrow.div[:-1], (0,) * 7)]
        assert terms_tail == [(-1, (0,) * 7, arrow.div[:-1])]


def test_repeated_subcell_entry(e1_signed):
    """A relation pair sharing its middle arrow yields a two-term entry."""
    _, _, qy, data, signed = e1_signed
    found = False
    for (row, col), terms in signed.matrices[1].items():
        if len(terms) == 2:
            found = True
            break
    assert found


def test_sign_corruption_detected(e1_signed):
    _, _, _, _, signed = e1_signed
    import copy
    broken = copy.deepcopy(signed)
    key = next(iter(broken.matrices[1]))
    s, a, b = broken.matrices[1][key][0]
    broken.matrices[1][key][0] = (-s, a, b)
    assert not check_dd_zero(broken)


def test_fiber_exactness_e1(e1_signed):
    _, _, _, _, signed = e1_signed
    rep = fiber_exactness_check(signed, 4, trials=8, diagonal_trials=4, seed=3)
    assert rep.ok
    assert rep.off_diagonal_ranks == (11, 28, 24, 7)
    assert rep.diagonal_homology == (1, 4, 6, 4, 1)


def test_fiber_exactness_deterministic_across_jobs(e1_signed):
    _, _, _, _, signed = e1_signed
    a = fiber_exactness_check(signed, 4, trials=4, diagonal_trials=2, seed=9, jobs=1)
    b = fiber_exactness_check(signed, 4, trials=4, diagonal_trials=2, seed=9, jobs=3)
    assert (a.ok, a.off_diagonal_ranks, a.diagonal_homology) == \
        (b.ok, b.off_diagonal_ranks, b.diagonal_homology)


def test_torus_orbit_invariance(e1_signed):
    from toricsec.diagonal import _rank_profile, torus_rescale
    fan, _, _, _, signed = e1_signed
    import random
    rng = random.Random(5)
    p = 2147483647
    xs = [rng.randrange(1, p) for _ in range(7)]
    ws = [rng.randrange(1, p) for _ in range(7)]
    base = _rank_profile(signed, xs, ws, p)
    xs2, ws2 = torus_rescale(xs, ws, fan, (3, -2, 5, 1), p)
    assert _rank_profile(signed, xs2, ws2, p) == base


def test_alternating_sums_of_paper_complexes():
    assert 11 - 39 + 52 - 31 + 7 == 0
    assert 17 - 50 + 59 - 38 + 12 == 0
    assert 17 - 60 + 76 - 43 + 10 == 0
    assert 23 - 87 + 124 - 78 + 18 == 0


def test_dropped_bundle_collection_inconclusive():
    """Removing one bundle breaks exactness; the verdict stays inconclusive."""
    fan = make_fan("P2")
    pic = deg_and_pic(fan)
    verdict = diagonal_resolution_verdict(fan, pic, [(0,), (1,)], trials=4,
                                          diagonal_trials=2, seed=0)
    assert verdict.status == "inconclusive"


def test_p2_full_verdict():
    fan = make_fan("P2")
    pic = deg_and_pic(fan)
    verdict = diagonal_resolution_verdict(fan, pic, [(0,), (1,), (2,)],
                                          trials=6, diagonal_trials=3, seed=0)
    assert verdict.full
    assert verdict.ranks == (3, 6, 3)


def test_threefold_verdict():
    fan = make_fan("D1_3")
    pic = deg_and_pic(fan, (3, 4, 5))
    bundles = [(0, 0, 0), (0, 1, 1), (0, 2, 2), (1, 0, 0), (1, 0, 1),
               (1, 1, 1), (1, 1, 2), (1, 2, 2)]
    verdict = diagonal_resolution_verdict(fan, pic, bundles, trials=6,
                                          diagonal_trials=3, seed=0)
    assert verdict.full
    assert verdict.fiber.diagonal_homology == (1, 3, 3, 1)
