"""Fans, lattice polytopes, divisor classes and contractions.

A fan stores primitive ray generators and maximal cones only; faces are
derived on demand.  All varieties in scope are smooth and complete (their
fans simplicial), except total spaces of canonical bundles which are
smooth but not complete.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .intlin import (
    IntMatrix,
    IntVector,
    det,
    invert_unimodular,
    kernel_basis,
    mat,
    mat_mul,
    mat_vec,
    primitive,
    rank,
    vec_gcd,
)


class FanError(ValueError):
    pass


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[IntVector, ...]
    max_cones: tuple[tuple[int, ...], ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(
            self, "max_cones",
            tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones))
        for r in self.rays:
            if len(r) != self.dim:
                raise FanError(f"ray {r} has wrong dimension")
            if vec_gcd(r) != 1:
                raise FanError(f"ray {r} is not primitive")
        for c in self.max_cones:
            if any(i < 0 or i >= len(self.rays) for i in c):
                raise FanError(f"cone {c} references a missing ray")
            if len(set(c)) != len(c):
                raise FanError(f"cone {c} repeats a ray")

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def is_face(self, ray_set) -> bool:
        s = set(ray_set)
        return any(s.issubset(c) for c in self.max_cones)

    def cone_matrix(self, cone) -> IntMatrix:
        return mat([self.rays[i] for i in cone])


@dataclass(frozen=True)
class FanReport:
    smooth: bool
    complete: bool
    fano: bool
    errors: tuple[str, ...] = ()


def _adjacency_connected(fan: Fan) -> bool:
    cones = fan.max_cones
    if not cones:
        return False
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(len(cones)):
            if j not in seen and len(set(cones[i]) & set(cones[j])) >= fan.dim - 1:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(cones)


def validate_fan(fan: Fan) -> FanReport:
    """Smoothness, completeness and the reflexive (Fano) property."""
    errors = []
    smooth = True
    for c in fan.max_cones:
        if len(c) != fan.dim:
            smooth = False
            errors.append(f"cone {c} is not simplicial of full dimension")
            continue
        if abs(det(fan.cone_matrix(c))) != 1:
            smooth = False
            errors.append(f"cone {c} has ray determinant != +-1")
    complete = False
    if all(len(c) == fan.dim for c in fan.max_cones):
        # every codim-1 face shared by exactly two maximal cones, connected
        counts: dict[tuple[int, ...], int] = {}
        for c in fan.max_cones:
            for facet in itertools.combinations(c, fan.dim - 1):
                counts[facet] = counts.get(facet, 0) + 1
        complete = bool(fan.max_cones) and all(v == 2 for v in counts.values()) \
            and _adjacency_connected(fan)
        if not complete:
            bad = [f for f, v in counts.items() if v != 2][:3]
            if bad:
                errors.append(f"codim-1 faces not paired: {bad}")
    fano = False
    if smooth and complete:
        try:
            face_fan = fan_from_rays(fan.dim, fan.rays, label=fan.label)
            fano = set(face_fan.max_cones) == set(fan.max_cones) and \
                _hull_is_reflexive(fan.rays, fan.dim)
        except FanError:
            fano = False
    return FanReport(smooth, complete, fano, tuple(errors))


def hull_facets(points, dim):
    """Facets of conv(points) as (normal w, c, tight index set), w.x >= c."""
    pts = [tuple(p) for p in points]
    facets = {}
    for subset in itertools.combinations(range(len(pts)), dim):
        base = pts[subset[0]]
        diffs = [tuple(pts[i][k] - base[k] for k in range(dim)) for i in subset[1:]]
        ker = kernel_basis(mat(diffs)) if diffs else \
            [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
        if len(ker) != 1:
            continue
        w = primitive(ker[0])
        c = sum(a * b for a, b in zip(w, base))
        vals = [sum(a * b for a, b in zip(w, p)) for p in pts]
        if all(v >= c for v in vals):
            pass
        elif all(v <= c for v in vals):
            w = tuple(-x for x in w)
            c = -c
            vals = [-v for v in vals]
        else:
            continue
        tight = tuple(i for i, v in enumerate(vals) if v == c)
        facets[(w, c)] = tight
    return [(w, c, tight) for (w, c), tight in facets.items()]


def _hull_is_reflexive(rays, dim) -> bool:
    for w, c, _ in hull_facets(rays, dim):
        # facet hyperplane w.x = c must be at lattice distance 1 from 0
        if c != -1:
            return False
    return True


def fan_from_rays(dim: int, rays, label: str = "") -> Fan:
    """Face fan of conv(rays); the origin must be interior."""
    facets = hull_facets(rays, dim)
    if not facets:
        raise FanError("rays do not span a full-dimensional hull")
    for w, c, _ in facets:
        if c >= 0:
            raise FanError("origin is not interior to the hull of the rays")
    cones = tuple(sorted(tight for _, _, tight in facets))
    return Fan(dim, tuple(tuple(r) for r in rays), cones, label=label)


@dataclass(frozen=True)
class PicBasis:
    """A choice of ray classes forming a Z-basis of Pic.

    deg is the matrix of the quotient map Z^{Sigma(1)} -> Pic; lifting a
    class places its coordinates on the basis rays.
    """

    basis_indices: tuple[int, ...]
    deg: IntMatrix  # r x d

    @property
    def rank(self) -> int:
        return len(self.basis_indices)

    @property
    def n_rays(self) -> int:
        return len(self.deg[0]) if self.deg else 0

    def deg_of(self, divisor) -> IntVector:
        return mat_vec(self.deg, divisor)

    def lift(self, cls) -> IntVector:
        x = [0] * self.n_rays
        for b, v in zip(self.basis_indices, cls):
            x[b] = v
        return tuple(x)

    def ray_class(self, ray_index: int) -> IntVector:
        return tuple(self.deg[i][ray_index] for i in range(self.rank))

    def canonical_class(self) -> IntVector:
        """Class of the canonical divisor -sum D_rho."""
        total = [0] * self.rank
        for ρ in range(self.n_rays):
            for i in range(self.rank):
                total[i] += self.deg[i][ρ]
        return tuple(-t for t in total)


def deg_and_pic(fan: Fan, basis_indices=None) -> PicBasis:
    """Quotient map of the ray exact sequence, with a pinned or lex-first basis."""
    d = fan.n_rays
    n = fan.dim
    r = d - n
    a_cols = [[fan.rays[ρ][j] for j in range(n)] for ρ in range(d)]  # d x n

    def square(basis):
        cols = [tuple(a_cols[ρ][j] for ρ in range(d)) for j in range(n)]
        cols += [tuple(1 if ρ == b else 0 for ρ in range(d)) for b in basis]
        return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))

    if basis_indices is None:
        for cand in itertools.combinations(range(d), r):
            if abs(det(square(cand))) == 1:
                basis_indices = cand
                break
        else:
            raise FanError("no ray subset gives a unimodular Pic basis")
    else:
        basis_indices = tuple(basis_indices)
        if abs(det(square(basis_indices))) != 1:
            raise FanError(f"rays {basis_indices} do not give a Pic basis")
    sq_inv = invert_unimodular(square(basis_indices))
    deg_rows = [[0] * d for _ in range(r)]
    for ρ in range(d):
        col = tuple(sq_inv[i][ρ] for i in range(d))
        for i in range(r):
            deg_rows[i][ρ] = col[n + i]
    pic = PicBasis(basis_indices, mat(deg_rows))
    # kernel of deg must be exactly the image of M
    for m_basis in range(n):
        img = tuple(fan.rays[ρ][m_basis] for ρ in range(d))
        if pic.deg_of(img) != (0,) * r:
            raise FanError("deg does not kill the character lattice")
    return pic


@dataclass(frozen=True)
class PrimitiveCollection:
    ray_indices: tuple[int, ...]
    relation: IntVector  # full-length vector over Z^{Sigma(1)}


def primitive_collections(fan: Fan) -> list[PrimitiveCollection]:
    """Minimal non-faces with their primitive relations."""
    d = fan.n_rays
    out = []
    for size in range(2, d + 1):
        for cand in itertools.combinations(range(d), size):
            if fan.is_face(cand):
                continue
            if any(not fan.is_face(sub) for sub in itertools.combinations(cand, size - 1)):
                continue
            s = [0] * fan.dim
            for i in cand:
                for j in range(fan.dim):
                    s[j] += fan.rays[i][j]
            relation = [0] * d
            for i in cand:
                relation[i] += 1
            if any(s):
                coeffs = _cone_coordinates(fan, tuple(s))
                if coeffs is None:
                    raise FanError(f"ray sum of {cand} lies in no cone; fan incomplete?")
                for j, c in coeffs:
                    relation[j] -= c
            out.append(PrimitiveCollection(cand, tuple(relation)))
    return out


def _cone_coordinates(fan: Fan, v):
    """(ray index, positive coefficient) pairs expressing v in a containing cone."""
    for cone in fan.max_cones:
        m = fan.cone_matrix(cone)
        inv = invert_unimodular(mat(list(zip(*m))))  # columns u_rho
        coeffs = mat_vec(inv, v)
        if all(c >= 0 for c in coeffs):
            return [(cone[i], coeffs[i]) for i in range(len(cone)) if coeffs[i] > 0]
    return None


@dataclass(frozen=True)
class ContractionStep:
    """A torus-invariant divisorial contraction source -> target."""

    source: Fan
    target: Fan
    collapsed_ray: int
    beta: IntMatrix   # Z^{source rays} -> Z^{target rays}
    gamma: IntMatrix  # Pic(source) -> Pic(target)
    source_pic: PicBasis
    target_pic: PicBasis

    def push_class(self, cls) -> IntVector:
        return mat_vec(self.gamma, cls)


def _subdivide(fan: Fan, σ: tuple[int, ...]) -> Fan:
    u = tuple(sum(fan.rays[i][j] for i in σ) for j in range(fan.dim))
    x = fan.n_rays
    new_cones = []
    for τ in fan.max_cones:
        if not set(σ).issubset(τ):
            new_cones.append(τ)
        else:
            for drop in σ:
                new_cones.append(tuple(sorted((set(τ) - {drop}) | {x})))
    return Fan(fan.dim, fan.rays + (u,), tuple(new_cones),
               label=f"{fan.label}*" if fan.label else "")


def star_subdivision(fan: Fan, cone_rays) -> tuple[Fan, ContractionStep]:
    """Insert the ray-sum generator of a cone; returns the blowup and its step."""
    σ = tuple(sorted(cone_rays))
    if not fan.is_face(σ):
        raise FanError(f"{σ} is not a cone of the fan")
    if len(σ) == 1:
        step = contraction_step(fan, fan, collapsed_ray=None)
        return fan, step
    source = _subdivide(fan, σ)
    return source, contraction_step(source, fan, collapsed_ray=fan.n_rays)


def contraction_step(source: Fan, target: Fan, collapsed_ray: int | None,
                     source_basis=None, target_basis=None) -> ContractionStep:
    """Build and verify the beta/gamma square for a blowdown."""
    if collapsed_ray is None:
        pic = deg_and_pic(source, source_basis)
        d = source.n_rays
        ident = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
        gid = tuple(tuple(1 if i == j else 0 for j in range(pic.rank)) for i in range(pic.rank))
        return ContractionStep(source, source, -1, ident, gid, pic, pic)
    kept = [i for i in range(source.n_rays) if i != collapsed_ray]
    if tuple(source.rays[i] for i in kept) != target.rays:
        raise FanError("target rays are not the source rays minus the collapsed one")
    u = source.rays[collapsed_ray]
    coeffs = _cone_coordinates(target, u)
    if coeffs is None or any(c != 1 for _, c in coeffs):
        raise FanError("collapsed ray is not a cone's ray sum in the target")
    σ = tuple(sorted(j for j, _ in coeffs))
    if not target.is_face(σ):
        raise FanError("the collapsed ray's support is not a cone of the target")
    rebuilt = _subdivide(target, σ)
    remap = {x: (kept.index(x) if x in kept else target.n_rays) for x in range(source.n_rays)}
    relabeled = set(tuple(sorted(remap[i] for i in c)) for c in source.max_cones)
    if relabeled != set(rebuilt.max_cones):
        raise FanError("source fan is not the star subdivision of the target")
    beta = mat([[1 if kept[t] == s else 0 for s in range(source.n_rays)]
                for t in range(target.n_rays)])
    pic_src = deg_and_pic(source, source_basis)
    pic_tgt = deg_and_pic(target, target_basis)
    gamma_cols = []
    for i in range(pic_src.rank):
        cls = tuple(1 if j == i else 0 for j in range(pic_src.rank))
        gamma_cols.append(pic_tgt.deg_of(mat_vec(beta, pic_src.lift(cls))))
    gamma = tuple(tuple(gamma_cols[j][i] for j in range(pic_src.rank))
                  for i in range(pic_tgt.rank))
    left = mat_mul(gamma, pic_src.deg)
    right = mat_mul(pic_tgt.deg, beta)
    if left != right:
        raise FanError("gamma . deg_source != deg_target . beta")
    return ContractionStep(source, target, collapsed_ray, beta, gamma, pic_src, pic_tgt)


def nef_ample_test(fan: Fan, pic: PicBasis, cls) -> tuple[bool, bool]:
    """Cartier-data criterion on a Pic class; returns (nef, ample)."""
    a = pic.lift(cls)
    nef = True
    ample = True
    for cone in fan.max_cones:
        m = fan.cone_matrix(cone)
        inv = invert_unimodular(m)
        m_sigma = mat_vec(inv, [-a[i] for i in cone])
        for ρ in range(fan.n_rays):
            val = sum(m_sigma[j] * fan.rays[ρ][j] for j in range(fan.dim))
            if val < -a[ρ]:
                return False, False
            if ρ not in cone and val == -a[ρ]:
                ample = False
        if not nef:
            break
    return nef, ample


def cartier_data(fan: Fan, pic: PicBasis, cls) -> list[IntVector]:
    """The vertices m_sigma with <m_sigma, u_rho> = -a_rho on each cone."""
    a = pic.lift(cls)
    out = []
    for cone in fan.max_cones:
        m = fan.cone_matrix(cone)
        inv = invert_unimodular(m)
        out.append(mat_vec(inv, [-a[i] for i in cone]))
    return out


def total_space_fan(fan: Fan) -> tuple[Fan, int]:
    """Fan of tot(omega_X) in dimension n+1, plus the index of the extra ray."""
    n = fan.dim
    rays = tuple(tuple(r) + (1,) for r in fan.rays) + ((0,) * n + (1,),)
    rho_tot = fan.n_rays
    cones = tuple(tuple(sorted(c + (rho_tot,))) for c in fan.max_cones)
    return Fan(n + 1, rays, cones, label=f"tot(w_{fan.label})" if fan.label else ""), rho_tot


@dataclass(frozen=True)
class LatticePolytope:
    vertices: tuple[IntVector, ...]
    facets: tuple[tuple[IntVector, int], ...]  # (u_F, a_F): <m, u_F> >= -a_F

    @classmethod
    def from_vertices(cls, vertices) -> "LatticePolytope":
        vs = [tuple(v) for v in vertices]
        dim = len(vs[0])
        raw = hull_facets(vs, dim)
        if not raw:
            raise FanError("polytope is not full-dimensional")
        facets = tuple((w, -int(c)) for w, c, _ in raw)
        hull_vert = set()
        for w, c, tight in raw:
            hull_vert.update(tight)
        # a vertex lies on >= dim facets
        count = {i: 0 for i in hull_vert}
        for _, _, tight in raw:
            for i in tight:
                count[i] += 1
        verts = tuple(sorted(vs[i] for i, k in count.items() if k >= dim))
        return cls(verts, facets)

    def is_reflexive(self) -> bool:
        return all(a == 1 for _, a in self.facets)

    def dual(self) -> "LatticePolytope":
        if not self.is_reflexive():
            raise FanError("dual polytope of a non-reflexive polytope is not a lattice polytope")
        return LatticePolytope.from_vertices([w for w, _ in self.facets])


def polytope_fan_roundtrip(p: LatticePolytope) -> Fan:
    """Face fan of the dual polytope; input must be reflexive."""
    for w, a in p.facets:
        if a != 1:
            raise FanError(f"facet with normal {w} has lattice distance {a} != 1")
    dual = p.dual()
    return fan_from_rays(len(dual.vertices[0]), dual.vertices)
