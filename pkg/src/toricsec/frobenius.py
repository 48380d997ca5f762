"""Frobenius pushforward decomposition of toric line bundles.

The m-th Frobenius pushforward of O(sum w_rho D_rho) splits into line
bundles indexed by residue vectors v with 0 <= v_i < m; the summand
classes come from an exact floor-division formula on the ray data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fans import Fan, PicBasis, ContractionStep, nef_ample_test
from .intlin import IntVector, invert_unimodular, mat, mat_vec


@dataclass(frozen=True)
class SplitSet:
    """Summand classes with multiplicities; multiplicities sum to m^n."""

    m: int
    weights: tuple[int, ...]
    multiplicity: dict[IntVector, int]

    @property
    def support(self) -> frozenset[IntVector]:
        return frozenset(self.multiplicity)

    def total(self) -> int:
        return sum(self.multiplicity.values())


def frobenius_summands(fan: Fan, pic: PicBasis, m: int, w, sigma=None) -> SplitSet:
    """Thomsen's algorithm for one divisor vector w and one chart sigma."""
    if m < 1:
        raise ValueError("m must be positive")
    w = tuple(int(x) for x in w)
    if len(w) != fan.n_rays:
        raise ValueError("w must have one entry per ray")
    if sigma is None:
        sigma = fan.max_cones[0]
    sigma = tuple(sigma)
    a_sigma = fan.cone_matrix(sigma)
    a_sigma_inv = invert_unimodular(a_sigma)  # smooth chart: integer inverse
    w_sigma = tuple(w[i] for i in sigma)
    mult: dict[IntVector, int] = {}
    for v in itertools.product(range(m), repeat=fan.dim):
        # t = A A_sigma^{-1} (v - w_sigma) + w, then q = floor(t / m)
        s = mat_vec(a_sigma_inv, tuple(vi - wi for vi, wi in zip(v, w_sigma)))
        q = []
        for ρ in range(fan.n_rays):
            t = sum(fan.rays[ρ][j] * s[j] for j in range(fan.dim)) + w[ρ]
            q.append(t // m)
        cls = pic.deg_of(q)
        mult[cls] = mult.get(cls, 0) + 1
    return SplitSet(m, w, mult)


def frobenius_split_classes(fan: Fan, pic: PicBasis, m: int, w,
                            check_charts: bool = False) -> SplitSet:
    """Summands, optionally asserting chart independence over all cones."""
    first = frobenius_summands(fan, pic, m, w, fan.max_cones[0])
    if check_charts:
        for sigma in fan.max_cones[1:]:
            other = frobenius_summands(fan, pic, m, w, sigma)
            if other.support != first.support:
                raise AssertionError(f"chart dependence at cone {sigma}")
    return first


def frobenius_gen_set(fan: Fan, pic: PicBasis, m: int) -> dict[IntVector, SplitSet]:
    """Union over the anticanonical twists w = (i,...,i), i = 0..n.

    Keyed by twist level i as a vector is unnecessary; the per-twist split
    sets are returned so callers can size each piece.
    """
    out = {}
    for i in range(fan.dim + 1):
        w = (i,) * fan.n_rays
        out[i] = frobenius_split_classes(fan, pic, m, w)
    return out


def frobenius_gen_support(fan: Fan, pic: PicBasis, m: int) -> frozenset[IntVector]:
    pieces = frobenius_gen_set(fan, pic, m)
    support: set[IntVector] = set()
    for piece in pieces.values():
        support |= piece.support
    return frozenset(support)


def nef_frobenius_collection(fan: Fan, pic: PicBasis, m: int) -> list[IntVector]:
    """{L in D_m : L^{-1} nef}, sorted; strong exceptional by the nef lemma."""
    split = frobenius_split_classes(fan, pic, m, (0,) * fan.n_rays)
    out = []
    for cls in split.support:
        inv = tuple(-x for x in cls)
        if nef_ample_test(fan, pic, inv)[0]:
            out.append(cls)
    return sorted(out)


def pushforward_gamma_agreement(step: ContractionStep, m: int, w_kind: str = "zero") -> bool:
    """f_* and gamma agree on Frobenius summands for w = 0 or w = -1's.

    The chart is a maximal cone of the source avoiding the collapsed ray, so
    its image is a cone of the target.
    """
    src, tgt = step.source, step.target
    if w_kind == "zero":
        w_src = (0,) * src.n_rays
        w_tgt = (0,) * tgt.n_rays
    elif w_kind == "omega":
        w_src = (-1,) * src.n_rays
        w_tgt = (-1,) * tgt.n_rays
    else:
        raise ValueError("w_kind must be 'zero' or 'omega'")
    x = step.collapsed_ray
    sigma_src = next(c for c in src.max_cones if x not in c)
    kept = [i for i in range(src.n_rays) if i != x]
    sigma_tgt = tuple(sorted(kept.index(i) for i in sigma_src))
    up = frobenius_summands(src, step.source_pic, m, w_src, sigma_src)
    down = frobenius_summands(tgt, step.target_pic, m, w_tgt, sigma_tgt)
    pushed = frozenset(tuple(mat_vec(step.gamma, cls)) for cls in up.support)
    return pushed == down.support
