#!/usr/bin/env python3
"""
Rooted-copy search and counting, the greedy builder and compatible families
"""

import math
import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from src.core.config import config
from src.core.errors import BudgetExceededError, HypergraphError, PhaseFailure, StrictModeRefusal
from src.core.hypergraph import Hypergraph, RootedMotif, VertexSet, degree_vector, edge_density
from src.core.models import PipelineConfig
from src.structures.degeneracy import edge_degeneracy
from src.structures.generators import loose_path, rng_for

logger = logging.getLogger(__name__)

RootTuple = Tuple[int, ...]


@dataclass
class RootedEmbedding:
    """Injective edge-preserving map V(F) -> V(H) with prescribed root images"""
    motif: RootedMotif
    image: Tuple[int, ...]
    root_targets: Tuple[int, ...]

    @property
    def vertices(self) -> Set[int]:
        return set(self.image)

    @property
    def non_root_images(self) -> List[int]:
        roots = set(self.motif.roots)
        return [v for x, v in enumerate(self.image) if x not in roots]

    def host_edges(self) -> List[Tuple[int, ...]]:
        """Images of the motif edges, in motif edge order"""
        return [tuple(self.image[x] for x in e) for e in self.motif.graph.edge_list()]

    def map_vertices(self, vertices: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.image[x] for x in vertices)


def embedding_violations(H: Hypergraph, emb: RootedEmbedding,
                         allowed: Optional[Set[int]] = None) -> List[str]:
    """Injectivity, edge preservation and root/allowed-set constraints"""
    violations = []
    F = emb.motif.graph
    if len(emb.image) != F.n:
        return [f"image has {len(emb.image)} entries, motif has {F.n} vertices"]
    if len(set(emb.image)) != len(emb.image):
        violations.append("embedding is not injective")
    if any(not 0 <= v < H.n for v in emb.image):
        violations.append("embedding leaves the host vertex range")
        return violations
    for x, y in zip(emb.motif.roots, emb.root_targets):
        if emb.image[x] != y:
            violations.append(f"root {x} maps to {emb.image[x]}, expected {y}")
    for e in F.edge_list():
        if not H.has_edge(emb.image[x] for x in e):
            violations.append(f"motif edge {e} maps to non-edge {[emb.image[x] for x in e]}")
    if allowed is not None:
        outside = [v for v in emb.non_root_images if v not in allowed]
        if outside:
            violations.append(f"non-root images {outside[:5]} outside the allowed set")
    return violations


# ------------------------------------------------------------------- search


def search_order(M: RootedMotif) -> List[int]:
    """Degeneracy witness exposure, reordered so each edge meets covered vertices when possible"""
    _, witness = edge_degeneracy(M)
    F = M.graph
    remaining = list(witness.order)
    covered = set(M.roots)
    order = []
    while remaining:
        pick = next((e for e in remaining if covered.intersection(F.edge(e))), remaining[0])
        remaining.remove(pick)
        order.append(pick)
        covered.update(F.edge(pick))
    return order


class _RootedSearch:
    """Backtracking over the exposure: one motif edge per level, candidates from the pivot's incidence"""

    def __init__(self, H: Hypergraph, M: RootedMotif, Y: Sequence[int], U: VertexSet,
                 budget: Optional[int]):
        if H.k != M.k:
            raise HypergraphError(f"motif uniformity {M.k} differs from host uniformity {H.k}")
        Y = tuple(int(y) for y in Y)
        if len(Y) != len(M.roots):
            raise HypergraphError(f"{len(Y)} root targets for {len(M.roots)} roots")
        if len(set(Y)) != len(Y):
            raise HypergraphError("root targets must be distinct")
        for y in Y:
            H._check_vertex(y)
        self.H = H
        self.M = M
        self.Y = Y
        self.budget = budget if budget is not None else config.search_budget
        self.explored = 0

        F = M.graph
        self.steps = [F.edge(i) for i in search_order(M)]
        in_edge = np.zeros(F.n, dtype=bool)
        if F.num_edges:
            in_edge[F.edges.ravel()] = True
        in_edge[list(M.roots)] = True
        self.isolated = [x for x in range(F.n) if not in_edge[x]]

        self.image = np.full(F.n, -1, dtype=np.int64)
        self.free = H.vertex_mask(U)
        if Y:
            self.image[list(M.roots)] = Y
            self.free[list(Y)] = False

    def _tick(self, amount: int = 1):
        self.explored += amount
        if self.explored > self.budget:
            raise BudgetExceededError(f"rooted search exceeded {self.budget} nodes",
                                      budget=self.budget, explored=self.explored)

    def _candidates(self, step: int) -> Tuple[np.ndarray, Set[int], List[int]]:
        H = self.H
        e = self.steps[step]
        mapped = [int(self.image[x]) for x in e if self.image[x] >= 0]
        new = [x for x in e if self.image[x] < 0]
        if mapped:
            pivot = min(mapped, key=lambda v: (int(H.vertex_degrees[v]), v))
            rows = H.edges[H.incident_edges(pivot)]
            ok = np.ones(rows.shape[0], dtype=bool)
            for v in mapped:
                if v != pivot:
                    ok &= (rows == v).any(axis=1)
            if new:
                ok &= self.free[rows].sum(axis=1) == len(new)
            rows = rows[ok]
        elif H.num_edges:
            rows = H.edges[self.free[H.edges].all(axis=1)]
        else:
            rows = H.edges
        return rows, set(mapped), new

    def _assign(self, xs: Sequence[int], vs: Sequence[int]):
        for x, v in zip(xs, vs):
            self.image[x] = v
            self.free[v] = False

    def _release(self, xs: Sequence[int]):
        for x in xs:
            self.free[self.image[x]] = True
            self.image[x] = -1

    def _finish_isolated(self) -> bool:
        spare = np.flatnonzero(self.free)[:len(self.isolated)]
        if spare.size < len(self.isolated):
            return False
        self.image[self.isolated] = spare
        return True

    def walk(self, step: int = 0) -> Iterator[Tuple[int, ...]]:
        """Yield every embedding in search order"""
        if step == len(self.steps):
            if self.isolated:
                if self._finish_isolated():
                    yield tuple(int(v) for v in self.image)
                    self.image[self.isolated] = -1
                return
            yield tuple(int(v) for v in self.image)
            return
        rows, mapped, new = self._candidates(step)
        for row in rows.tolist():
            fresh = [v for v in row if v not in mapped]
            for perm in permutations(fresh):
                self._tick()
                self._assign(new, perm)
                yield from self.walk(step + 1)
                self._release(new)

    def count(self, step: int = 0) -> int:
        if step == len(self.steps):
            spare = int(self.free.sum())
            return math.perm(spare, len(self.isolated)) if self.isolated else 1
        rows, mapped, new = self._candidates(step)
        if step == len(self.steps) - 1 and not self.isolated:
            self._tick(rows.shape[0])
            return rows.shape[0] * math.factorial(len(new))
        total = 0
        for row in rows.tolist():
            fresh = [v for v in row if v not in mapped]
            for perm in permutations(fresh):
                self._tick()
                self._assign(new, perm)
                total += self.count(step + 1)
                self._release(new)
        return total


def find_rooted_copy(H: Hypergraph, M: RootedMotif, Y: Sequence[int], U: VertexSet,
                     budget: Optional[int] = None) -> Optional[RootedEmbedding]:
    """First rooted copy of M at Y with all non-root images in U minus Y, or None.

    Raises BudgetExceededError when the node budget runs out before the search space does.
    """
    search = _RootedSearch(H, M, Y, U, budget)
    image = next(search.walk(), None)
    if image is None:
        return None
    return RootedEmbedding(M, image, search.Y)


def iter_rooted_copies(H: Hypergraph, M: RootedMotif, Y: Sequence[int], U: VertexSet,
                       budget: Optional[int] = None) -> Iterator[RootedEmbedding]:
    """All rooted copies in search order; the budget covers the whole enumeration"""
    search = _RootedSearch(H, M, Y, U, budget)
    for image in search.walk():
        yield RootedEmbedding(M, image, search.Y)


def count_rooted_copies(H: Hypergraph, M: RootedMotif, Y: Sequence[int], U: VertexSet,
                        budget: Optional[int] = None) -> int:
    """Exact number of labelled rooted copies"""
    return _RootedSearch(H, M, Y, U, budget).count()


def counting_lower_bound(c: float, p: float, edge_count: int, U_size: int, f: int) -> float:
    """1/2 (cp)^e(F) |U|^f"""
    return 0.5 * (c * p) ** edge_count * float(U_size) ** f


def count_upper_bound_check(count: int, p: float, edge_count: int, U_size: int, f: int,
                            gamma: float) -> bool:
    """Soft upper side: count <= (1 + (e(F)+1) gamma) p^e(F) |U|^f; logged, never raised"""
    bound = (1.0 + (edge_count + 1) * gamma) * p ** edge_count * float(U_size) ** f
    if count > bound:
        logger.warning(f"⚠️ Rooted count {count} above soft upper estimate {bound:.1f}")
        return False
    return True


# ---------------------------------------------------------- compatible families


@dataclass
class CompatibleFamily:
    """Rooted copies indexed by template edges, plus the edges that got none"""
    template_edges: List[RootTuple]
    copies: Dict[RootTuple, RootedEmbedding] = field(default_factory=dict)
    failed: List[RootTuple] = field(default_factory=list)
    template_vertices: Optional[Set[int]] = None
    phases: Dict[str, int] = field(default_factory=dict)

    @property
    def vertex_set_T(self) -> Set[int]:
        if self.template_vertices is not None:
            return set(self.template_vertices)
        return {v for e in self.template_edges for v in e}

    @property
    def complete(self) -> bool:
        return not self.failed and len(self.copies) == len(self.template_edges)

    def used_vertices(self) -> Set[int]:
        return {v for emb in self.copies.values() for v in emb.non_root_images}

    def to_json(self) -> Dict[str, object]:
        return {
            "copies": [{"edge": list(e), "image": list(emb.image)} for e, emb in self.copies.items()],
            "failed": [list(e) for e in self.failed],
        }


def greedy_builder(H: Hypergraph, M: RootedMotif, ordered_edges: Sequence[RootTuple],
                   X: VertexSet, budget: Optional[int] = None) -> CompatibleFamily:
    """Embed a copy rooted at each tuple in turn, removing its non-root vertices from X"""
    available = H.vertex_mask(X)
    family = CompatibleFamily([tuple(int(v) for v in e) for e in ordered_edges])
    for e in family.template_edges:
        try:
            emb = find_rooted_copy(H, M, e, available, budget)
        except BudgetExceededError as ex:
            logger.warning(f"⚠️ Search budget exhausted for root tuple {e} ({ex.explored} nodes)")
            emb = None
        if emb is None:
            family.failed.append(e)
            continue
        family.copies[e] = emb
        available[emb.non_root_images] = False
    return family


def verify_compatible(fam: CompatibleFamily, H: Hypergraph) -> Tuple[bool, List[str]]:
    """Embedding validity plus the three compatibility conditions"""
    violations: List[str] = []
    V_T = fam.vertex_set_T
    owner: Dict[int, RootTuple] = {}
    for e, emb in fam.copies.items():
        violations.extend(f"copy at {e}: {msg}" for msg in embedding_violations(H, emb))
        if tuple(emb.map_vertices(emb.motif.roots)) != tuple(e):
            violations.append(f"condition 1: copy at {e} is not rooted at {e}")
        touching = (emb.vertices & V_T) - set(e)
        if touching:
            violations.append(f"condition 2: copy at {e} meets V_T outside its edge at {sorted(touching)}")
        for v in emb.non_root_images:
            if v in owner:
                violations.append(f"condition 3: copies at {owner[v]} and {e} share vertex {v}")
            else:
                owner[v] = e
    for e in fam.failed:
        if e in fam.copies:
            violations.append(f"edge {e} is both failed and embedded")
    return len(violations) == 0, violations


def build_compatible_family(H: Hypergraph, M: RootedMotif, T_edges: Sequence[RootTuple],
                            pool: VertexSet, cfg: PipelineConfig,
                            template_vertices: Optional[Set[int]] = None) -> CompatibleFamily:
    """Three-phase family: low-degree edges first, main greedy pass, leftovers in a reserve"""
    edges = [tuple(int(v) for v in e) for e in T_edges]
    V_T = set(template_vertices) if template_vertices is not None else {v for e in edges for v in e}
    if not edges:
        return CompatibleFamily([], template_vertices=V_T)

    n, k = H.n, H.k
    f = M.non_root_count
    r = len(M.roots)
    p = cfg.p if cfg.p is not None else edge_density(H)
    into_rest = degree_vector(H, ~H.vertex_mask(V_T))
    floor = cfg.c * p * float(n) ** (k - 1)
    weak = sorted(v for v in V_T if into_rest[v] < floor)
    if weak:
        lowest = int(min(into_rest[v] for v in weak))
        msg = (f"{len(weak)} template vertices have deg(v; V minus V_T) below c p n^(k-1) = {floor:.1f} "
               f"(lowest {lowest})")
        if cfg.strict:
            logger.error(f"❌ Compatible family degree precondition fails: {msg}")
            raise StrictModeRefusal("compatible_family", msg, {"weak": weak[:20], "floor": floor})
        logger.warning(f"⚠️ Compatible family degree precondition waived: {msg}")

    degree = np.bincount(np.asarray(edges).ravel(), minlength=n)
    max_deg = int(degree.max())
    size_limit = n / (200 * cfg.delta ** 2 * (r + f) ** 2)
    if max_deg > cfg.delta or len(V_T) > size_limit:
        msg = f"|V_T| = {len(V_T)} (limit {size_limit:.2f}), max degree {max_deg} (cap {cfg.delta})"
        if cfg.strict:
            logger.error(f"❌ Compatible family preconditions fail: {msg}")
            raise StrictModeRefusal("compatible_family", msg)
        logger.warning(f"⚠️ Compatible family preconditions waived: {msg}")

    pool_mask = H.vertex_mask(pool)
    pool_mask[list(V_T)] = False
    candidates = np.flatnonzero(pool_mask)
    reserve_size = math.ceil(2 * cfg.gamma * n) if cfg.strict else int(cfg.family_reserve_fraction * candidates.size)
    if candidates.size < f or reserve_size < 1 or reserve_size >= candidates.size:
        logger.error(f"❌ Cannot reserve sets: pool of {candidates.size}, reserve {reserve_size}")
        raise PhaseFailure("compatible_family", "reserved-set construction impossible",
                           {"pool": int(candidates.size), "reserve": reserve_size})

    rng = rng_for(cfg.seed)
    shuffled = rng.permutation(candidates)
    W = np.sort(shuffled[:reserve_size])
    U = np.sort(shuffled[reserve_size:])

    low = set()
    if k >= 2 and W.size >= k - 1:
        into_W = degree_vector(H, W)
        threshold = 2 * cfg.c * p * float(W.size) ** (k - 1)
        low = {v for v in V_T if into_W[v] < threshold}

    T1 = [e for e in edges if low.intersection(e)]
    T2 = [e for e in edges if not low.intersection(e)]
    logger.info(f"🔄 Compatible family: {len(edges)} edges, {len(T1)} meet the low-degree set, "
                f"|U| = {U.size}, |W| = {W.size}")

    available = H.vertex_mask(U)
    family = CompatibleFamily(edges, template_vertices=V_T)
    leftovers: List[RootTuple] = []
    for phase, batch in (("T1", T1), ("T2", T2)):
        part = greedy_builder(H, M, batch, available, cfg.search_budget)
        for e, emb in part.copies.items():
            family.copies[e] = emb
            available[emb.non_root_images] = False
        leftovers.extend(part.failed)
        family.phases[phase] = len(part.copies)

    if leftovers:
        reserve = greedy_builder(H, M, leftovers, W, cfg.search_budget)
        family.copies.update(reserve.copies)
        family.failed = list(reserve.failed)
        family.phases["T3"] = len(reserve.copies)

    # keep copies in template edge order
    family.copies = {e: family.copies[e] for e in edges if e in family.copies}
    if family.failed:
        logger.warning(f"⚠️ {len(family.failed)} template edges have no compatible copy")
    else:
        logger.info(f"✅ Compatible family complete: {len(family.copies)} copies")
    return family


# -------------------------------------------------------------- connectors


def connect_pairs(H: Hypergraph, pairs: Sequence[Tuple[int, int]], X: VertexSet,
                  budget: Optional[int] = None, length: int = 3) -> List[List[Tuple[int, ...]]]:
    """Join each (a, b) by a loose path of the given length whose interior lies in X"""
    path = loose_path(H.k, length)
    rooted = path.with_roots(path.ends)
    family = greedy_builder(H, rooted, [tuple(p) for p in pairs], X, budget)
    if family.failed:
        logger.error(f"❌ No connector for pairs {family.failed[:3]}")
        raise PhaseFailure("connect", f"{len(family.failed)} of {len(pairs)} pairs could not be joined",
                           {"failed": [list(p) for p in family.failed]})
    return [family.copies[tuple(p)].host_edges() for p in pairs]
