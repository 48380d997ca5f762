"""End-to-end recipes: contraction propagation, helix threads, total-space
tilting, and per-variety verification dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cohomology import (
    ChainVerdict,
    has_higher_cohomology,
    strong_exceptional_along_chain,
    strong_exceptional_check,
)
from .diagonal import diagonal_resolution_verdict
from .fans import Fan, PicBasis, ContractionStep, contraction_step, nef_ample_test
from .frobenius import frobenius_gen_support, frobenius_split_classes
from .method1 import GenerationCertificate, generation_closure


class PipelineError(ValueError):
    pass


@dataclass
class PosetNode:
    label: str
    fan: Fan | None = None
    pic: PicBasis | None = None
    bundles: list | None = None
    theta: tuple | None = None
    recipe: str = ""
    frobenius_m: int | None = None


@dataclass
class PosetEdge:
    source: str
    target: str
    collapsed_ray: int | None = None
    note: str = ""


@dataclass
class ContractionPoset:
    nodes: dict[str, PosetNode] = field(default_factory=dict)
    edges: list[PosetEdge] = field(default_factory=list)

    def add_node(self, node: PosetNode):
        if node.label in self.nodes:
            raise PipelineError(f"duplicate poset label {node.label}")
        self.nodes[node.label] = node

    def runnable_edges(self):
        for e in self.edges:
            src = self.nodes.get(e.source)
            dst = self.nodes.get(e.target)
            if src and dst and src.fan and dst.fan and e.collapsed_ray is not None:
                yield e

    def step(self, edge: PosetEdge) -> ContractionStep:
        src = self.nodes[edge.source]
        dst = self.nodes[edge.target]
        src_basis = src.pic.basis_indices if src.pic else None
        dst_basis = dst.pic.basis_indices if dst.pic else None
        return contraction_step(src.fan, dst.fan, edge.collapsed_ray,
                                source_basis=src_basis, target_basis=dst_basis)

    def chain(self, source: str, target: str) -> list[ContractionStep]:
        """Shortest runnable edge chain from source to target."""
        prev: dict[str, PosetEdge] = {}
        queue = [source]
        seen = {source}
        while queue:
            cur = queue.pop(0)
            if cur == target:
                break
            for e in self.runnable_edges():
                if e.source == cur and e.target not in seen:
                    seen.add(e.target)
                    prev[e.target] = e
                    queue.append(e.target)
        if target not in seen:
            raise PipelineError(f"no contraction chain {source} -> {target}")
        edges = []
        cur = target
        while cur != source:
            e = prev[cur]
            edges.append(e)
            cur = e.source
        return [self.step(e) for e in reversed(edges)]


@dataclass(frozen=True)
class PropagationReport:
    ok: bool
    membership_m: int | None
    chain_verdict: ChainVerdict | None
    detail: str = ""


def frobenius_membership(fan: Fan, pic: PicBasis, bundles, m: int):
    """L subset of D_m union D(omega)_m, allowing the dual collection.

    Returns ("direct"|"dual", None) on success or (None, offending bundle).
    """
    d_m = frobenius_split_classes(fan, pic, m, (0,) * fan.n_rays).support
    d_w = frobenius_split_classes(fan, pic, m, (-1,) * fan.n_rays).support
    pool = d_m | d_w
    bundles = [tuple(b) for b in bundles]
    missing = [b for b in bundles if b not in pool]
    if not missing:
        return "direct", None
    missing_dual = [b for b in bundles if tuple(-x for x in b) not in pool]
    if not missing_dual:
        return "dual", None
    return None, missing_dual[0]


def propagate_collection(chain, bundles, m: int) -> PropagationReport:
    """Push a full collection down a contraction chain.

    Membership of the collection (or its dual) in D_m union D(omega)_m is
    the fullness-transport precondition; strong exceptionality along the
    chain then makes every image collection full strong exceptional.
    """
    if not chain:
        raise PipelineError("empty contraction chain")
    fan = chain[0].source
    pic = chain[0].source_pic
    kind, offending = frobenius_membership(fan, pic, bundles, m)
    if kind is None:
        return PropagationReport(False, None, None,
                                 f"bundle {offending} (nor its dual) lies in "
                                 f"D_m u D(omega)_m at m={m}")
    verdict = strong_exceptional_along_chain(chain, bundles)
    return PropagationReport(verdict.ok, m, verdict,
                             "" if verdict.ok else verdict.failure)


@dataclass(frozen=True)
class HelixResult:
    ok: bool
    collection: tuple
    ordering: tuple = ()
    detail: str = ""


def helix_twist(fan: Fan, pic: PicBasis, ordered_bundles, steps: int,
                twist) -> HelixResult:
    """Shift a full strong exceptional collection along its helix and twist.

    The thread replaces the first `steps` bundles by their anticanonical
    twists at the far end; strong exceptionality of the result is
    re-verified, fullness is inherited from the helix.
    """
    bundles = [tuple(b) for b in ordered_bundles]
    r = len(bundles)
    if not 0 <= steps <= r:
        raise PipelineError("steps must lie between 0 and the collection size")
    minus_omega = tuple(-w for w in pic.canonical_class())
    thread = bundles[steps:] + [
        tuple(b + w for b, w in zip(x, minus_omega)) for x in bundles[:steps]]
    twisted = [tuple(b + t for b, t in zip(x, twist)) for x in thread]
    verdict = strong_exceptional_check(fan, pic, twisted)
    if not verdict.ok:
        return HelixResult(False, tuple(twisted),
                           detail=f"thread is exceptional but not strong: {verdict.failure}")
    return HelixResult(True, tuple(twisted), verdict.ordering)


@dataclass(frozen=True)
class TiltingReport:
    ok: bool
    threshold: int
    failures: tuple = ()

    @property
    def T(self) -> int:
        return self.threshold


def tilting_total_space_check(fan: Fan, pic: PicBasis, bundles,
                              cap: int = 10) -> TiltingReport:
    """Certify the pulled-back sum as tilting on tot(omega).

    T is the least t making every difference class nef after t
    anticanonical twists; all lower twists must have vanishing higher
    cohomology for every ordered pair.
    """
    bundles = [tuple(b) for b in bundles]
    omega = pic.canonical_class()
    threshold = None
    for t in range(cap + 1):
        if all(nef_ample_test(fan, pic,
                              tuple(b - a - t * w for a, b, w in zip(x, y, omega)))[0]
               for x in bundles for y in bundles):
            threshold = t
            break
    if threshold is None:
        return TiltingReport(False, -1, (("threshold", "exceeded cap", cap),))
    failures = []
    for t in range(threshold):
        for i, x in enumerate(bundles):
            for j, y in enumerate(bundles):
                if i == j:
                    continue
                cls = tuple(b - a - t * w for a, b, w in zip(x, y, omega))
                bad, fs = has_higher_cohomology(fan, pic, cls)
                if bad:
                    failures.append((i, j, t, tuple(sorted(fs.ray_indices))))
    return TiltingReport(not failures, threshold, tuple(failures))


# ----------------------------------------------------------------- recipes

@dataclass(frozen=True)
class RecipeVerdict:
    label: str
    recipe: str
    status: str          # pass / fail / inconclusive
    detail: str = ""


def product_fan(f1: Fan, f2: Fan) -> Fan:
    rays = [tuple(r) + (0,) * f2.dim for r in f1.rays]
    rays += [(0,) * f1.dim + tuple(r) for r in f2.rays]
    cones = []
    for c1 in f1.max_cones:
        for c2 in f2.max_cones:
            cones.append(tuple(c1) + tuple(f1.n_rays + i for i in c2))
    label = f"{f1.label}x{f2.label}" if f1.label and f2.label else ""
    return Fan(f1.dim + f2.dim, tuple(rays), tuple(cones), label=label)


def box_product_collection(pic1: PicBasis, pic2: PicBasis, b1, b2):
    return [tuple(a) + tuple(b) for a in b1 for b in b2]


def verify_variety_recipe(workspace, label: str, m: int | None = None,
                          seed: int = 0, trials: int = 32,
                          prime: int = 2147483647) -> RecipeVerdict:
    """Dispatch one database row through its stated verification route."""
    poset = workspace.poset
    if label not in poset.nodes:
        return RecipeVerdict(label, "", "fail", "label missing from the database")
    node = poset.nodes[label]
    recipe = node.recipe
    if not recipe:
        return RecipeVerdict(label, "", "fail", "no recipe recorded")
    kind = recipe.split()[0]
    if kind == "beilinson":
        fan, pic = node.fan, node.pic
        n = fan.dim
        bundles = [(k,) + (0,) * (pic.rank - 1) for k in range(n + 1)]
        se = strong_exceptional_check(fan, pic, bundles)
        dual = [tuple(-x for x in b) for b in bundles]
        mm = m or node.frobenius_m or 2
        targets = frobenius_gen_support(fan, pic, mm)
        closure = generation_closure(fan, pic, dual, targets)
        ok = se.ok and isinstance(closure, GenerationCertificate)
        return RecipeVerdict(label, recipe, "pass" if ok else "fail",
                             f"method1 targets={len(targets)} at m={mm}")
    if kind == "product":
        factors = recipe.split()[1].split(",")
        sub = [poset.nodes[f] for f in factors]
        fan = node.fan
        pic = node.pic
        se = strong_exceptional_check(fan, pic, node.bundles)
        ok = se.ok and all(s.fan is not None for s in sub)
        return RecipeVerdict(label, recipe, "pass" if ok else "fail",
                             "box product re-verified strong exceptional"
                             if se.ok else se.failure)
    if kind == "method1":
        fan, pic = node.fan, node.pic
        mm = m or node.frobenius_m or 10
        se = strong_exceptional_check(fan, pic, node.bundles)
        if not se.ok:
            return RecipeVerdict(label, recipe, "fail", f"not strong exceptional: {se.failure}")
        targets = frobenius_gen_support(fan, pic, mm)
        closure = generation_closure(fan, pic, node.bundles, targets)
        if isinstance(closure, GenerationCertificate):
            return RecipeVerdict(label, recipe, "pass",
                                 f"{len(closure.steps)} closure steps to {len(targets)} targets")
        return RecipeVerdict(label, recipe, "inconclusive",
                             f"{len(closure.unreached)} targets unreached")
    if kind == "method2":
        fan, pic = node.fan, node.pic
        se = strong_exceptional_check(fan, pic, node.bundles)
        if not se.ok:
            return RecipeVerdict(label, recipe, "fail", f"not strong exceptional: {se.failure}")
        verdict = diagonal_resolution_verdict(fan, pic, node.bundles, theta=node.theta,
                                              trials=trials, seed=seed, prime=prime)
        status = "pass" if verdict.full else "inconclusive"
        return RecipeVerdict(label, recipe, status,
                             f"ranks={verdict.ranks} stage={verdict.stage}")
    if kind == "from":
        source = recipe.split()[1]
        chain = poset.chain(source, label)
        src = poset.nodes[source]
        mm = m or src.frobenius_m or 8
        report = propagate_collection(chain, src.bundles, mm)
        return RecipeVerdict(label, recipe, "pass" if report.ok else "fail",
                             report.detail or f"propagated from {source} at m={mm}")
    return RecipeVerdict(label, recipe, "fail", f"unknown recipe kind {kind}")
