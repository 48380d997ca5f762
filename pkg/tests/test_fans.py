import pytest

from toricsec.fans import (
    Fan,
    FanError,
    LatticePolytope,
    contraction_step,
    deg_and_pic,
    fan_from_rays,
    nef_ample_test,
    polytope_fan_roundtrip,
    primitive_collections,
    star_subdivision,
    total_space_fan,
    validate_fan,
)
from toricsec.intlin import mat_mul, mat_vec

from conftest import RAYS, make_fan


def test_p2_is_smooth_complete_fano():
    rep = validate_fan(make_fan("P2"))
    assert rep.smooth and rep.complete and rep.fano


def test_e1_is_smooth_complete_fano():
    rep = validate_fan(make_fan("E1"))
    assert rep.smooth and rep.complete and rep.fano


def test_e1_with_cone_deleted_not_complete():
    fan = make_fan("E1")
    broken = Fan(fan.dim, fan.rays, fan.max_cones[1:], label="broken")
    rep = validate_fan(broken)
    assert not rep.complete and rep.errors


@pytest.mark.parametrize("label", sorted(RAYS))
def test_all_bundled_fans_are_fano(label):
    rep = validate_fan(make_fan(label))
    assert rep.smooth and rep.complete and rep.fano


def test_primitive_collections_p2():
    fan = make_fan("P2")
    cols = primitive_collections(fan)
    assert len(cols) == 1
    assert cols[0].ray_indices == (0, 1, 2)
    assert cols[0].relation == (1, 1, 1)


def test_primitive_collections_i1_contains_u0_u7():
    fan = make_fan("I1")
    assert any(c.ray_indices == (0, 7) for c in primitive_collections(fan))


def test_primitive_collections_p1xp1_brute():
    fan = make_fan("P1xP1")
    cols = primitive_collections(fan)
    assert sorted(c.ray_indices for c in cols) == [(0, 2), (1, 3)]
    for c in cols:
        # opposite rays: relation is just the sum
        assert sum(abs(x) for x in c.relation) == 2


def test_star_subdivision_of_p2_gives_s1():
    fan = make_fan("P2")
    sub, step = star_subdivision(fan, (0, 1))
    assert sub.rays[-1] == (1, 1)
    rep = validate_fan(sub)
    assert rep.smooth and rep.complete and rep.fano
    assert set(sub.max_cones) == set(make_fan("S1").max_cones)


def test_star_subdivision_b1_at_u4_u5_gives_e1():
    b1 = make_fan("B1")
    sub, step = star_subdivision(b1, (4, 5))
    assert sub.rays[-1] == (2, -1, -1, -1)
    assert set(sub.max_cones) == set(make_fan("E1").max_cones)
    # gamma . deg_source == deg_target . beta by construction
    assert mat_mul(step.gamma, step.source_pic.deg) == mat_mul(step.target_pic.deg, step.beta)


def test_star_subdivision_at_ray_is_identity():
    fan = make_fan("P2")
    sub, step = star_subdivision(fan, (1,))
    assert sub is fan
    assert step.source is step.target


def test_subdivision_preserves_smoothness_random():
    import random
    rng = random.Random(7)
    for label in ("P3", "D1_3"):
        fan = make_fan(label)
        for _ in range(2):
            cone = rng.choice(fan.max_cones)
            size = rng.randint(2, len(cone))
            σ = tuple(sorted(rng.sample(cone, size)))
            sub, _ = star_subdivision(fan, σ)
            assert validate_fan(sub).smooth


def test_deg_and_pic_p1():
    fan = make_fan("P1")
    pic = deg_and_pic(fan)
    assert pic.rank == 1
    assert pic.ray_class(0) == pic.ray_class(1)


def test_deg_matrix_e1_matches_displayed_matrix():
    pic = deg_and_pic(make_fan("E1"), (4, 5, 6))
    assert pic.deg == (
        (1, 0, 0, 0, 1, 0, 0),
        (-3, 1, 1, 1, 0, 1, 0),
        (-2, 1, 1, 1, 0, 0, 1),
    )


def test_linear_equivalences_i1():
    pic = deg_and_pic(make_fan("I1"), (4, 5, 6, 7))
    assert pic.ray_class(0) == (0, -2, 1, 1)   # D0 ~ -2D5 + D6 + D7
    assert pic.ray_class(1) == (1, 0, 0, 0)    # D1 ~ D4
    assert pic.ray_class(2) == (-1, 1, 0, -1)  # D2 ~ -D4 + D5 - D7
    assert pic.ray_class(3) == (0, 1, 0, 0)    # D3 ~ D5


def test_deg_kernel_rank(fans):
    for label, fan in fans.items():
        pic = deg_and_pic(fan)
        assert pic.rank == fan.n_rays - fan.dim
        for j in range(fan.dim):
            column = tuple(fan.rays[i][j] for i in range(fan.n_rays))
            assert pic.deg_of(column) == (0,) * pic.rank


def test_nef_ample_trivial_bundle():
    fan = make_fan("P2")
    pic = deg_and_pic(fan)
    nef, ample = nef_ample_test(fan, pic, (0,))
    assert nef and not ample


def test_nef_ample_e1_product_bundle():
    fan = make_fan("E1")
    pic = deg_and_pic(fan, (4, 5, 6))
    nef, ample = nef_ample_test(fan, pic, (7, 15, 18))
    assert nef and ample


def test_e1_collection_is_nef():
    fan = make_fan("E1")
    pic = deg_and_pic(fan, (4, 5, 6))
    bundles = e1_collection()
    for b in bundles:
        assert nef_ample_test(fan, pic, b)[0]


def e1_collection():
    out = [(0, i, i) for i in range(4)]
    out += [(1, i, i) for i in range(4)]
    out += [(1, j, j + 1) for j in range(3)]
    return out


def test_total_space_p1():
    fan, rho_tot = total_space_fan(make_fan("P1"))
    assert fan.n_rays == 3
    assert fan.rays[rho_tot] == (0, 1)
    assert set(fan.rays) == {(1, 1), (-1, 1), (0, 1)}
    assert validate_fan(fan).smooth


def test_total_space_p2_pic_rank():
    fan, _ = total_space_fan(make_fan("P2"))
    pic = deg_and_pic(fan)
    assert pic.rank == 1


def test_polytope_roundtrip_square():
    square = LatticePolytope.from_vertices([(1, 1), (1, -1), (-1, 1), (-1, -1)])
    fan = polytope_fan_roundtrip(square)
    assert set(fan.rays) == set(RAYS["P1xP1"])


def test_polytope_roundtrip_p4():
    # the reflexive simplex whose dual is conv(e_1..e_4, -e_1-..-e_4)
    verts = [(-1, -1, -1, -1)]
    for i in range(4):
        v = [-1] * 4
        v[i] = 4
        verts.append(tuple(v))
    fan = polytope_fan_roundtrip(LatticePolytope.from_vertices(verts))
    assert validate_fan(fan).fano
    assert set(fan.rays) == set(RAYS["P4"])


def test_double_dual_identity_e1():
    hull = LatticePolytope.from_vertices(RAYS["E1"])
    assert hull.is_reflexive()
    assert sorted(hull.dual().dual().vertices) == sorted(hull.vertices)


def test_nonreflexive_rejected():
    big = LatticePolytope.from_vertices([(2, 0), (0, 2), (-2, -2)])
    with pytest.raises(FanError):
        polytope_fan_roundtrip(big)


def test_contraction_step_rejects_mismatch():
    with pytest.raises(FanError):
        contraction_step(make_fan("E1"), make_fan("P3"), collapsed_ray=6)
