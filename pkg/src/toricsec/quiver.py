"""Quivers of sections and quiver-moduli embedding certificates.

Vertices are the bundles of an ordered effective collection; arrows are
irreducible torus-invariant sections.  On the total space of the
canonical bundle the same construction produces the cyclic covering
quiver whose anticanonical cycles feed the diagonal-resolution cells.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fans import Fan, PicBasis, nef_ample_test, cartier_data
from .intlin import IntVector
from .polyhedra import (
    RationalPolyhedron,
    _norm_ineq,
    _Projections,
    polytope_lattice_points,
    simplex_feasible,
)


@dataclass(frozen=True)
class Arrow:
    tail: int
    head: int
    div: IntVector


@dataclass(frozen=True)
class QuiverOfSections:
    bundles: tuple[IntVector, ...]
    arrows: tuple[Arrow, ...]
    cyclic: bool = False
    n_variables: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.bundles)

    def arrows_from(self, v: int):
        return [a for a in self.arrows if a.tail == v]

    def arrows_into(self, v: int):
        return [a for a in self.arrows if a.head == v]


class QuiverError(ValueError):
    pass


def sections(pic: PicBasis, cls) -> list[IntVector]:
    """Exponent vectors of the torus-invariant sections of a class."""
    poly = RationalPolyhedron(pic.n_rays)
    for i in range(pic.rank):
        poly.add_eq(tuple(pic.deg[i]), cls[i])
    for ρ in range(pic.n_rays):
        e = [0] * pic.n_rays
        e[ρ] = 1
        poly.add_ineq(tuple(e), 0)
    try:
        return polytope_lattice_points(poly)
    except ValueError:
        raise QuiverError(f"section space of {cls} is infinite")


def _dominates_some(e, staircase) -> bool:
    for f in staircase:
        if all(x >= y for x, y in zip(e, f)):
            return True
    return False


def _box_fiber(pic: PicBasis, cls, upper) -> list[IntVector]:
    """Lattice points of {0 <= f <= upper, deg f = cls}; boxes stay tiny."""
    poly = RationalPolyhedron(pic.n_rays)
    for i in range(pic.rank):
        poly.add_eq(tuple(pic.deg[i]), cls[i])
    for ρ in range(pic.n_rays):
        e = [0] * pic.n_rays
        e[ρ] = 1
        poly.add_ineq(tuple(e), 0)
        poly.add_ineq(tuple(-x for x in e), -upper[ρ])
    return polytope_lattice_points(poly)


def build_quiver_of_sections(fan: Fan, pic: PicBasis, bundles) -> QuiverOfSections:
    """Acyclic quiver of sections of an ordered effective collection.

    An arrow is a section monomial that dominates no section through an
    intermediate bundle (the complement factor is then automatically a
    section, so dominance is exactly reducibility).
    """
    bundles = [tuple(b) for b in bundles]
    r = len(bundles)
    secs: dict[tuple[int, int], list[IntVector]] = {}
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            diff = tuple(b - a for a, b in zip(bundles[i], bundles[j]))
            s = sections(pic, diff)
            if s and j < i:
                raise QuiverError(
                    f"collection is not Hom-ordered: sections from {i} to {j}")
            if s:
                secs[(i, j)] = s
    arrows = []
    for (i, j), s_ij in sorted(secs.items()):
        vias = [secs[(i, k)] for k in range(r)
                if k != i and k != j and (i, k) in secs and (k, j) in secs]
        for e in s_ij:
            if not any(_dominates_some(e, via) for via in vias):
                arrows.append(Arrow(i, j, e))
    arrows.sort(key=lambda a: (a.tail, a.head, a.div))
    return QuiverOfSections(tuple(bundles), tuple(arrows), cyclic=False,
                            n_variables=pic.n_rays)


def _pruned_fiber(pic: PicBasis, cls, staircase) -> list[IntVector]:
    """Fiber lattice points of {x >= 0, deg x = cls} under the staircase.

    Enumerates the exponent coordinates directly so a branch dies as soon
    as its assigned prefix dominates a staircase monomial supported on the
    assigned coordinates; the full fiber may be huge, the survivors never
    are.
    """
    d = pic.n_rays
    ineqs = []
    for ρ in range(d):
        e = [0] * d
        e[ρ] = 1
        ineqs.append((tuple(e), 0))
    for i in range(pic.rank):
        row = tuple(pic.deg[i])
        ineqs.append((row, cls[i]))
        ineqs.append((tuple(-x for x in row), -cls[i]))
    proj = _Projections([_norm_ineq(c, r) for c, r in ineqs], d)
    if not proj.feasible_real():
        return []
    from math import ceil, floor
    by_support = [[f for f in staircase if not any(f[i] for i in range(k + 1, d))]
                  for k in range(d)]
    out = []

    def rec(prefix):
        k = len(prefix)
        lo, hi = proj.var_interval(prefix)
        if lo is None or hi is None:
            raise QuiverError("unbounded section fiber")
        a, b = ceil(lo), floor(hi)
        for v in range(a, b + 1):
            nxt = prefix + (v,)
            if any(all(x >= y for x, y in zip(nxt, f)) for f in by_support[k]):
                continue  # already dominates a staircase monomial
            if k + 1 == d:
                out.append(nxt)
            else:
                rec(nxt)

    rec(())
    return out


def covering_quiver_on_y(fan: Fan, pic: PicBasis, bundles,
                         level_cap: int = 3) -> QuiverOfSections:
    """Quiver of sections of the pulled-back collection on tot(omega).

    A section at level p is a section of the p-th anticanonical twist on
    the base; its exponent vector gains a final rho_tot coordinate p.
    Every composite section dominates the divisor of the first arrow of
    any factorization, so candidates are enumerated under the staircase of
    the lower-level arrows out of their tail and then reduced against
    same-level arrows in order of total degree.  Levels at the cap must
    come up empty.
    """
    bundles = [tuple(b) for b in bundles]
    r = len(bundles)
    minus_omega = tuple(-w for w in pic.canonical_class())
    base = build_quiver_of_sections(fan, pic, bundles)
    arrows = [Arrow(a.tail, a.head, a.div + (0,)) for a in base.arrows]

    def level_class(i, j, p):
        return tuple(bj - bi + p * w
                     for bi, bj, w in zip(bundles[i], bundles[j], minus_omega))

    for p in range(1, level_cap + 1):
        out_divs = [[a.div[:-1] for a in arrows if a.tail == i] for i in range(r)]
        survivors = []
        for i in range(r):
            for j in range(r):
                for e in _pruned_fiber(pic, level_class(i, j, p), out_divs[i]):
                    survivors.append((sum(e), i, j, e))
        survivors.sort()
        new_by_tail: dict[int, list] = {i: [] for i in range(r)}
        added = []
        for _, i, j, e in survivors:
            reduced = False
            for head_k, div_k in new_by_tail[i]:
                if all(x >= y for x, y in zip(e, div_k)) and not (head_k == j and div_k == e):
                    reduced = True
                    break
            if not reduced:
                new_by_tail[i].append((j, e))
                added.append(Arrow(i, j, tuple(e) + (p,)))
        if p >= level_cap and added:
            raise QuiverError(
                f"irreducible sections at level {level_cap}; raise level_cap: "
                f"{[(a.tail, a.head, a.div) for a in added[:3]]}")
        arrows.extend(added)
    arrows.sort(key=lambda a: (a.tail, a.head, a.div))
    return QuiverOfSections(tuple(bundles), tuple(arrows), cyclic=True,
                            n_variables=pic.n_rays + 1)


def parallel_path_relations(quiver: QuiverOfSections, max_len: int | None = None):
    """Generators p_i - p_j: parallel paths with equal divisor of zeroes.

    Only meaningful for the acyclic quiver on X; path enumeration is finite.
    """
    if quiver.cyclic:
        raise QuiverError("parallel-path enumeration needs an acyclic quiver")
    paths: dict[tuple[int, int, IntVector], list[tuple[int, ...]]] = {}

    def extend(v, arrows_so_far, div):
        for idx, a in enumerate(quiver.arrows):
            if a.tail != v:
                continue
            nd = tuple(x + y for x, y in zip(div, a.div))
            np_ = arrows_so_far + (idx,)
            if max_len is None or len(np_) <= max_len:
                tail = quiver.arrows[np_[0]].tail
                paths.setdefault((tail, a.head, nd), []).append(np_)
                extend(a.head, np_, nd)

    zero = (0,) * quiver.n_variables
    for v in range(quiver.n_vertices):
        extend(v, (), zero)
    out = []
    for key, plist in sorted(paths.items()):
        for p, q in itertools.combinations(sorted(plist), 2):
            out.append((key, p, q))
    return out


# ---------------------------------------------------------------- stability

@dataclass(frozen=True)
class StabilityReport:
    generic: bool
    failures: tuple = ()
    certificates: tuple = ()


def torus_fixed_bits(quiver: QuiverOfSections, fan: Fan, cone) -> tuple[int, ...]:
    """Arrow bits of the torus-fixed representation at a maximal cone."""
    bits = []
    for a in quiver.arrows:
        off = any(a.div[ρ] > 0 for ρ in cone)
        bits.append(0 if off else 1)
    return tuple(bits)


def _closure(quiver, bits, start):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for idx, a in enumerate(quiver.arrows):
            if bits[idx] and a.tail == v and a.head not in seen:
                seen.add(a.head)
                stack.append(a.head)
    return seen


def _path_to(quiver, bits, start, targets):
    """A nonzero-arrow path from start into `targets`, as arrow indices."""
    prev = {start: None}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v in targets:
            path = []
            while prev[v] is not None:
                idx = prev[v]
                path.append(idx)
                v = quiver.arrows[idx].tail
            return tuple(reversed(path))
        for idx, a in enumerate(quiver.arrows):
            if bits[idx] and a.tail == v and a.head not in prev:
                prev[a.head] = idx
                queue.append(a.head)
    return None


def check_theta_generic(quiver: QuiverOfSections, fan: Fan, theta) -> StabilityReport:
    """Torus-fixed-point genericity certificates for Y_theta ~= X.

    Per maximal cone this produces the certificate pair the verification
    procedure calls for: a nonzero-arrow path from the source to every
    positively-weighted vertex, and from every other vertex a nonzero-arrow
    path to some positively-weighted vertex.  theta must assign a negative
    weight to the source and nonnegative weights elsewhere (the closed
    chamber of the special parameter).
    """
    theta = tuple(int(t) for t in theta)
    if len(theta) != quiver.n_vertices or sum(theta) != 0:
        raise QuiverError("theta must be a weight: one entry per vertex, sum zero")
    if theta[0] >= 0 and quiver.n_vertices > 1:
        raise QuiverError("expected a negative weight at the source vertex")
    if any(t < 0 for t in theta[1:]):
        raise QuiverError("weights away from the source must be nonnegative")
    positives = {i for i, t in enumerate(theta) if t > 0}
    failures = []
    certs = []
    for cone in fan.max_cones:
        bits = torus_fixed_bits(quiver, fan, cone)
        cone_cert = {"cone": cone, "from_source": {}, "to_positive": {}}
        bad = None
        for t in sorted(positives):
            path = _path_to(quiver, bits, 0, {t})
            if path is None:
                bad = (cone, "source does not reach the positive vertex", t)
                break
            cone_cert["from_source"][t] = path
        for v in range(1, quiver.n_vertices):
            if bad:
                break
            path = _path_to(quiver, bits, v, positives)
            if path is None:
                bad = (cone, "closed set with nonpositive weight",
                       sorted(_closure(quiver, bits, v)))
                break
            cone_cert["to_positive"][v] = path
        if bad:
            failures.append(bad)
        else:
            certs.append(cone_cert)
    return StabilityReport(not failures, tuple(failures), tuple(certs))


# ------------------------------------------------------------- embeddings

@dataclass(frozen=True)
class EmbeddingVerdict:
    ok: bool
    route: str
    detail: str = ""
    product_class: IntVector | None = None
    vertex_matrix: tuple | None = None


def section_polytope_vertices(fan: Fan, pic: PicBasis, cls) -> list[IntVector]:
    """Vertices of P_L for nef L: one Cartier vertex per maximal cone."""
    a = pic.lift(cls)
    out = []
    for m_sigma in cartier_data(fan, pic, cls):
        v = tuple(sum(m_sigma[j] * fan.rays[ρ][j] for j in range(fan.dim)) + a[ρ]
                  for ρ in range(fan.n_rays))
        if any(x < 0 for x in v):
            raise QuiverError("Cartier vertex is not a lattice section; class not nef")
        if v not in out:
            out.append(v)
    return out


def minkowski_embedding_check(fan: Fan, pic: PicBasis, bundles) -> EmbeddingVerdict:
    """Nef route: product ample and Minkowski sum of section polytopes full."""
    bundles = [tuple(b) for b in bundles]
    for b in bundles:
        if not nef_ample_test(fan, pic, b)[0]:
            return EmbeddingVerdict(False, "nef",
                                    detail=f"bundle {b} is not nef; use the Y_theta route")
    product = tuple(sum(b[i] for b in bundles) for i in range(pic.rank))
    nef, ample = nef_ample_test(fan, pic, product)
    if not ample:
        return EmbeddingVerdict(False, "nef", detail="product bundle is not ample",
                                product_class=product)
    big_vertices = section_polytope_vertices(fan, pic, product)
    d = pic.n_rays
    r = len(bundles)
    # v in sum of the P_{L_i} iff the block system {x_i >= 0, deg x_i = L_i,
    # sum_i x_i = v} is feasible; containment the other way is automatic.
    eq_rows = []
    rhs = []
    for i, b in enumerate(bundles):
        for row_i in range(pic.rank):
            row = [0] * (d * r)
            for ρ in range(d):
                row[i * d + ρ] = pic.deg[row_i][ρ]
            eq_rows.append(row)
            rhs.append(b[row_i])
    for v in big_vertices:
        rows = list(eq_rows)
        rh = list(rhs)
        for ρ in range(d):
            row = [0] * (d * r)
            for i in range(r):
                row[i * d + ρ] = 1
            rows.append(row)
            rh.append(v[ρ])
        if simplex_feasible(rows, rh, d * r) is None:
            return EmbeddingVerdict(False, "nef",
                                    detail=f"vertex {v} missing from the Minkowski sum",
                                    product_class=product)
    matrix = tuple(tuple(v[ρ] for v in big_vertices) for ρ in range(d))
    return EmbeddingVerdict(True, "nef", product_class=product, vertex_matrix=matrix)


def pic_of_theta(bundles, theta) -> IntVector:
    rank = len(bundles[0])
    return tuple(sum(t * b[i] for t, b in zip(theta, bundles)) for i in range(rank))


def theta_fiber_surjectivity_check(quiver: QuiverOfSections, fan: Fan,
                                   pic: PicBasis, theta) -> EmbeddingVerdict:
    """Non-nef route: every section monomial of pic(theta) is a path-divisor sum.

    Integer flows with divergence theta on an acyclic quiver decompose into
    source-to-sink unit paths, so the check reduces to a sumset of per-target
    path-divisor sets.
    """
    if quiver.cyclic:
        raise QuiverError("the flow polytope argument needs the acyclic quiver on X")
    theta = tuple(int(t) for t in theta)
    cls = pic_of_theta(quiver.bundles, theta)
    nef, ample = nef_ample_test(fan, pic, cls)
    if not ample:
        return EmbeddingVerdict(False, "theta", detail="pic(theta) is not ample",
                                product_class=cls)
    if any(t < 0 for t in theta[1:]) or theta[0] != -sum(theta[1:]):
        raise QuiverError("theta must be supported as (-k; nonnegative)")
    d = pic.n_rays
    zero = (0,) * d
    # path-divisor sets from the source
    order = _topological_order(quiver)
    path_divs: list[set[IntVector]] = [set() for _ in range(quiver.n_vertices)]
    path_divs[0] = {zero}
    for v in order:
        for a in quiver.arrows_from(v):
            for s in path_divs[v]:
                path_divs[a.head].add(tuple(x + y for x, y in zip(s, a.div)))
    targets = []
    for i, t in enumerate(theta):
        if i and t > 0:
            targets.extend([i] * t)
    sums = {zero}
    for tgt in targets:
        if not path_divs[tgt]:
            return EmbeddingVerdict(False, "theta",
                                    detail=f"no path from the source to vertex {tgt}")
        sums = {tuple(x + y for x, y in zip(s, p))
                for s in sums for p in path_divs[tgt]}
    fiber = sections(pic, cls)
    missing = [e for e in fiber if tuple(e) not in sums]
    if missing:
        return EmbeddingVerdict(False, "theta",
                                detail=f"{len(missing)} section monomials unreachable, "
                                       f"first {missing[0]}",
                                product_class=cls)
    return EmbeddingVerdict(True, "theta", product_class=cls,
                            detail=f"{len(fiber)} section monomials realized")


def _topological_order(quiver: QuiverOfSections) -> list[int]:
    indeg = [0] * quiver.n_vertices
    for a in quiver.arrows:
        indeg[a.head] += 1
    queue = sorted(v for v in range(quiver.n_vertices) if indeg[v] == 0)
    out = []
    while queue:
        v = queue.pop(0)
        out.append(v)
        for a in quiver.arrows_from(v):
            indeg[a.head] -= 1
            if indeg[a.head] == 0:
                queue.append(a.head)
    if len(out) != quiver.n_vertices:
        raise QuiverError("quiver has a directed cycle; flow polytope unbounded")
    return out
