#!/usr/bin/env python3
"""
Absorption pipeline phases: cover a small set, build the absorbing structure, finish the cover
"""

import math
import time
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import islice
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from src.core.errors import (BudgetExceededError, HypergraphError, PhaseFailure, StrictModeRefusal,
                             TemplateConstructionError)
from src.core.hypergraph import Hypergraph, RootedMotif, VertexSet, degree_vector, edge_density
from src.core.models import PipelineConfig
from src.embedding.embedder import (CompatibleFamily, build_compatible_family, connect_pairs,
                                    find_rooted_copy, greedy_builder, iter_rooted_copies)
from src.structures.absorbers import FactorAbsorber, PathAbsorber, build_factor_absorber, build_path_absorber
from src.structures.generators import loose_path, rng_for
from src.structures.templates import PlacedTemplate, build_template, place_template

logger = logging.getLogger(__name__)

Edge = Tuple[int, ...]

# Copies materialised per level of the leftover search
CANDIDATE_CAP = 64
# Candidate edges scored per greedy path extension
EXTENSION_CANDIDATES = 16
# Edges' worth of vertices the greedy path leaves for the closing search
CLOSING_RESERVE_EDGES = 4


def _p(H: Hypergraph, cfg: PipelineConfig) -> float:
    return cfg.p if cfg.p is not None else edge_density(H)


def _precondition(cfg: PipelineConfig, phase: str, ok: bool, message: str):
    if ok:
        return
    if cfg.strict:
        logger.error(f"❌ [{phase}] strict precondition violated: {message}")
        raise StrictModeRefusal(phase, message)
    logger.warning(f"⚠️ [{phase}] precondition waived: {message}")


@contextmanager
def _timed(store: Dict[str, float], phase: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        store[phase] = store.get(phase, 0.0) + time.perf_counter() - start


# ------------------------------------------------------------ greedy phases


def greedy_tiling(H: Hypergraph, F: Hypergraph, vertices: VertexSet, cfg: PipelineConfig
                  ) -> Tuple[List[Edge], List[int]]:
    """Tile by copies of F rooted at each uncovered vertex in turn; return (tiles, leftover)"""
    rooted = [RootedMotif(F, (role,)) for role in range(F.n)]
    available = H.vertex_mask(vertices)
    tiles: List[Edge] = []
    leftover: List[int] = []
    for v in np.flatnonzero(available).tolist():
        if not available[v]:
            continue
        emb = None
        for M in rooted:
            try:
                emb = find_rooted_copy(H, M, (v,), available, cfg.search_budget)
            except BudgetExceededError:
                logger.warning(f"⚠️ Tiling search budget exhausted at vertex {v}")
                emb = None
            if emb is not None:
                break
        if emb is None:
            leftover.append(v)
            available[v] = False
            continue
        tiles.append(emb.image)
        available[list(emb.image)] = False
    return tiles, leftover


def _extension_degree(H: Hypergraph, y: int, available: np.ndarray) -> int:
    rows = H.edges[H.incident_edges(y)]
    return int((available[rows].sum(axis=1) == H.k - 1).sum())


def greedy_loose_path(H: Hypergraph, start: int, available: np.ndarray, stop_at: int = 0
                      ) -> Tuple[List[Edge], List[int]]:
    """Grow a loose path from `start` inside `available` (mutated), choosing ends by extension degree.

    Returns the edges and the sequence of ends (start first).
    """
    k = H.k
    ends = [int(start)]
    edges: List[Edge] = []
    available[start] = False
    while int(available.sum()) > stop_at:
        x = ends[-1]
        rows = H.edges[H.incident_edges(x)]
        rows = rows[available[rows].sum(axis=1) == k - 1][:EXTENSION_CANDIDATES]
        if rows.shape[0] == 0:
            break
        best = None
        for row in rows.tolist():
            new = [v for v in row if v != x]
            available[new] = False
            for y in new:
                ext = _extension_degree(H, y, available)
                if best is None or ext > best[0]:
                    best = (ext, row, y, new)
            available[new] = True
        _, row, y, new = best
        available[new] = False
        edges.append(tuple([x] + [v for v in new if v != y] + [y]))
        ends.append(y)
    return edges, ends


# ------------------------------------------------------------------ small-set cover


@dataclass
class SmallSetCover:
    """Vertex set R covering the small set, with its F-factor or loose path"""
    vertices: Set[int]
    pieces: List[Edge] = field(default_factory=list)
    path: List[Edge] = field(default_factory=list)
    ends: Optional[Tuple[int, int]] = None


def cover_small_set(H: Hypergraph, B_ordered: Sequence[int], X: VertexSet, mode: str,
                    F: Optional[Hypergraph] = None, cfg: Optional[PipelineConfig] = None) -> SmallSetCover:
    """Cover B by absorbers placed in X (factor) or string B into one loose path through X (path)"""
    cfg = cfg or PipelineConfig()
    B = [int(b) for b in B_ordered]
    if len(set(B)) != len(B):
        raise HypergraphError("vertices to cover must be distinct")
    X_mask = H.vertex_mask(X)
    if B and X_mask[B].any():
        raise HypergraphError("the set to cover must be disjoint from X")
    if mode not in ("factor", "path"):
        raise ValueError(f"Unknown cover mode '{mode}'")
    if not B:
        return SmallSetCover(set())

    k = H.k
    f = F.n if F is not None else 0
    x_size = int(X_mask.sum())
    needed = max(cfg.gamma * H.n / 4, 800 * (f * f + 9 * k * k) ** 2 * len(B))
    _precondition(cfg, "patch", x_size >= needed, f"|X| = {x_size} below {needed:.0f}")
    p = _p(H, cfg)
    into_X = degree_vector(H, X_mask)
    low = [b for b in B if into_X[b] < cfg.c * p * x_size ** (k - 1)]
    _precondition(cfg, "patch", not low, f"{len(low)} vertices with low degree into X")

    if mode == "factor":
        if F is None:
            raise HypergraphError("factor mode needs a motif F")
        absorber = build_factor_absorber(F)
        group = list(B)
        pad = (-len(B)) % f
        if pad:
            inside = np.flatnonzero(X_mask)
            ranked = inside[np.lexsort((inside, -H.vertex_degrees[inside]))]
            extra = ranked[:pad].tolist()
            X_mask[extra] = False
            group.extend(extra)
        roots = [tuple(group[i:i + f]) for i in range(0, len(group), f)]
        family = greedy_builder(H, absorber.motif, roots, X_mask, cfg.search_budget)
        if family.failed:
            logger.error(f"❌ No absorber for root groups {family.failed[:3]}")
            raise PhaseFailure("patch", f"{len(family.failed)} absorber copies could not be placed",
                               {"failed": [list(t) for t in family.failed]})
        pieces = [family.copies[t].map_vertices(piece) for t in roots for piece in absorber.complete_factor]
        logger.info(f"✅ Covered {len(B)} vertices with {len(pieces)} F-copies")
        return SmallSetCover({v for piece in pieces for v in piece}, pieces=pieces)

    if len(B) == 1:
        return SmallSetCover({B[0]}, ends=(B[0], B[0]))
    segments = connect_pairs(H, list(zip(B[:-1], B[1:])), X_mask, cfg.search_budget)
    path = [e for segment in segments for e in segment]
    logger.info(f"✅ Strung {len(B)} vertices into a loose path of {len(path)} edges")
    return SmallSetCover({v for e in path for v in e}, path=path, ends=(B[0], B[-1]))


# ------------------------------------------------------------------ absorbing structure


@dataclass
class AbsorbingStructure:
    """Absorbing set A, patch U and flexible set Z = Z1 + Z2, with the witnesses behind them"""
    mode: str
    k: int
    m: int
    Z1: List[int]
    Z2: List[int]
    A: Set[int]
    U_patch: Set[int]
    W: List[int]
    placed: PlacedTemplate
    family: CompatibleFamily
    absorber: Union[FactorAbsorber, PathAbsorber]
    patch: SmallSetCover
    connectors: List[List[Edge]] = field(default_factory=list)
    ends: Optional[Tuple[int, int]] = None
    F: Optional[Hypergraph] = None
    notes: List[str] = field(default_factory=list)
    phase_seconds: Dict[str, float] = field(default_factory=dict)

    @property
    def Z(self) -> List[int]:
        return self.Z1 + self.Z2

    @property
    def vertices(self) -> Set[int]:
        return self.A | self.U_patch


def low_degree_vertices(H: Hypergraph, named_sets: Sequence[Tuple[str, VertexSet]], p: float,
                        cfg: PipelineConfig, notes: List[str]) -> List[int]:
    """Vertices v with deg(v; S) < (p/4)|S|^(k-1) for some audited set S"""
    bad = np.zeros(H.n, dtype=bool)
    for name, S in named_sets:
        mask = H.vertex_mask(S)
        size = int(mask.sum())
        if not cfg.strict and size < cfg.degree_audit_min_size:
            notes.append(f"degree audit skipped {name} (|{name}| = {size})")
            continue
        bad |= degree_vector(H, mask) < (p / 4) * float(size) ** (H.k - 1)
    return np.flatnonzero(bad).tolist()


def size_audit(size: int, r: int, n: int, cfg: PipelineConfig, notes: List[str]) -> bool:
    """|A u U| <= 8 r^2 beta n; refuse in strict mode, note it otherwise"""
    bound = 8 * r * r * cfg.beta * n
    if size <= bound:
        return True
    message = f"|A u U| = {size} exceeds 8 r^2 beta n = {bound:.0f}"
    if cfg.strict:
        logger.error(f"❌ {message}")
        raise StrictModeRefusal("size_audit", message, {"size": size, "bound": bound})
    logger.warning(f"⚠️ {message}")
    notes.append(message)
    return False


def build_absorbing_structure(H: Hypergraph, mode: str, F: Optional[Hypergraph] = None,
                              cfg: Optional[PipelineConfig] = None) -> AbsorbingStructure:
    """Carve, audit degrees, patch, trim, place the template and hang absorbers on its edges"""
    cfg = cfg or PipelineConfig()
    timings: Dict[str, float] = {}
    notes: List[str] = []
    n, k = H.n, H.k
    ham = mode == "ham"
    if mode not in ("factor", "ham"):
        raise ValueError(f"Unknown structure mode '{mode}'")
    if ham:
        if k < 3:
            raise PhaseFailure("absorbing_structure", "path absorbers need k >= 3")
        absorber = build_path_absorber(k)
        r = k - 1
    else:
        if F is None:
            raise HypergraphError("factor mode needs a motif F")
        if F.k != k:
            raise HypergraphError(f"motif uniformity {F.k} differs from host uniformity {k}")
        absorber = build_factor_absorber(F)
        r = F.n

    m = cfg.scale_m(n, ham)
    g = cfg.z_split_offset(n)
    s = cfg.trim_slack
    if g >= m:
        raise PhaseFailure("carve", f"Z split offset {g} must be below m = {m}")
    logger.info(f"🔄 Building {mode} absorbing structure: n={n}, k={k}, m={m}, r={r}, mode={cfg.mode}")

    with _timed(timings, "carve"):
        names = ["Z1", "Z2", "Y0"] + [f"Y{i}" for i in range(1, r)]
        targets = [m + g, m - g, 2 * m] + [3 * m] * (r - 1)
        w_size = math.ceil(cfg.alpha_frac * n)
        if sum(targets) + s * len(targets) + w_size > n:
            message = f"carved sets need {sum(targets) + s * len(targets) + w_size} of {n} vertices"
            if cfg.strict:
                logger.error(f"❌ {message}")
                raise StrictModeRefusal("carve", message)
            raise PhaseFailure("carve", message)
        perm = rng_for(cfg.seed).permutation(n)
        carved, pos = [], 0
        for t in targets:
            carved.append(perm[pos:pos + t + s].tolist())
            pos += t + s
        W_hat = perm[pos:pos + w_size].tolist()
        Y_hat = [v for part in carved for v in part]

    with _timed(timings, "degree_audit"):
        p = _p(H, cfg)
        if p <= 0:
            logger.error("❌ Host has no edges")
            raise PhaseFailure("degree_audit", "host has no edges; every vertex has degree 0")
        rest = np.ones(n, dtype=bool)
        rest[Y_hat] = False
        rest[W_hat] = False
        named = (("Z1", carved[0]), ("Z2", carved[1]), ("W", W_hat), ("rest", rest))
        B = low_degree_vertices(H, named, p, cfg, notes)
        limit = max(k, math.ceil(cfg.gamma * n))
        if len(B) > limit:
            logger.error(f"❌ {len(B)} vertices fail the degree audit (limit {limit})")
            raise PhaseFailure("degree_audit", f"{len(B)} vertices have low degree into the carved sets",
                               {"bad": len(B), "limit": limit})

    with _timed(timings, "patch"):
        X_hat = np.ones(n, dtype=bool)
        X_hat[B] = False
        X_hat[Y_hat] = False
        X_hat[W_hat] = False
        patch = cover_small_set(H, B, X_hat, "path" if ham else "factor", None if ham else F, cfg)
        U = set(patch.vertices)

    with _timed(timings, "trim"):
        trimmed = []
        for name, part, t in zip(names, carved, targets):
            kept = [v for v in part if v not in U]
            if len(kept) < t:
                raise PhaseFailure("trim", f"{name} lost {len(part) - len(kept)} vertices to the patch "
                                           f"(slack {s})")
            trimmed.append(kept[:t])
        W = [v for v in W_hat if v not in U]
        Z1, Z2 = trimmed[0], trimmed[1]
        notes.append(f"carved sets trimmed to exact sizes with slack {s}")

    with _timed(timings, "template"):
        try:
            T = build_template(r, m, seed=cfg.seed, degree_cap=cfg.delta, retries=cfg.template_retries,
                               rounds=cfg.template_rounds, flex_budget=cfg.flex_budget)
        except TemplateConstructionError as e:
            raise PhaseFailure("template", str(e), {"attempts": e.attempts})
        placed = place_template(T, [Z1 + Z2 + trimmed[2]] + trimmed[3:])

    with _timed(timings, "compatible_family"):
        Y = set(placed.vertices)
        pool = np.ones(n, dtype=bool)
        pool[list(U)] = False
        pool[W] = False
        pool[list(Y)] = False
        family = build_compatible_family(H, absorber.motif, placed.host_edges(), pool, cfg,
                                         template_vertices=Y)
        if family.failed:
            raise PhaseFailure("compatible_family", f"{len(family.failed)} template edges without absorber",
                               {"failed": [list(e) for e in family.failed]})

    connectors: List[List[Edge]] = []
    ends = None
    if ham:
        with _timed(timings, "connect"):
            chain = [family.copies[e] for e in placed.host_edges()]
            absorber_ends = [emb.map_vertices(absorber.motif.ends) for emb in chain]
            pairs = []
            if patch.ends is not None:
                pairs.append((patch.ends[1], absorber_ends[0][0]))
            pairs.extend((absorber_ends[i][1], absorber_ends[i + 1][0]) for i in range(len(chain) - 1))
            connectors = connect_pairs(H, pairs, H.vertex_mask(W), cfg.search_budget) if pairs else []
            start = patch.ends[0] if patch.ends is not None else absorber_ends[0][0]
            ends = (int(start), int(absorber_ends[-1][1]))

    A = set(Y)
    for emb in family.copies.values():
        A.update(emb.non_root_images)
    for segment in connectors:
        A.update(v for e in segment for v in e)
    A -= U

    size_audit(len(A | U), r, n, cfg, notes)
    logger.info(f"✅ Absorbing structure: |A| = {len(A)}, |U| = {len(U)}, |Z| = {2 * m}, "
                f"{len(family.copies)} absorbers")
    return AbsorbingStructure(mode=mode, k=k, m=m, Z1=Z1, Z2=Z2, A=A, U_patch=U, W=W, placed=placed,
                              family=family, absorber=absorber, patch=patch, connectors=connectors,
                              ends=ends, F=F, notes=notes, phase_seconds=timings)


def extract_flexible_cover(H: Hypergraph, struct: AbsorbingStructure, Zprime: Sequence[int]
                           ) -> Tuple[List[Edge], List[str]]:
    """F-factor (factor mode) or a_1-a_2 loose path (ham mode) of H[(A u U) minus Z']"""
    matching = struct.placed.matching_for(Zprime)
    if matching is None:
        raise PhaseFailure("flexibility", f"no template matching after removing {sorted(Zprime)}")
    chosen = set(matching)
    template_edges = struct.placed.host_edges()

    if struct.mode == "factor":
        pieces = list(struct.patch.pieces)
        labels = ["claim2:patch"] * len(pieces)
        for e in template_edges:
            emb = struct.family.copies[e]
            complete = e in chosen
            which = struct.absorber.complete_factor if complete else struct.absorber.internal_factor
            for piece in which:
                pieces.append(emb.map_vertices(piece))
                labels.append("claim2:absorber-complete" if complete else "claim2:absorber-internal")
        return pieces, labels

    path = list(struct.patch.path)
    labels = ["claim2:patch"] * len(path)
    segments = iter(struct.connectors)
    if struct.patch.ends is not None:
        segment = next(segments)
        path.extend(segment)
        labels.extend(["claim2:connector"] * len(segment))
    for i, e in enumerate(template_edges):
        emb = struct.family.copies[e]
        which = "complete" if e in chosen else "internal"
        for edge in struct.absorber.path_edges(which):
            path.append(emb.map_vertices(edge))
            labels.append(f"claim2:absorber-{which}")
        if i < len(template_edges) - 1:
            segment = next(segments)
            path.extend(segment)
            labels.extend(["claim2:connector"] * len(segment))
    return path, labels


# ------------------------------------------------------------------ cover completion


@dataclass
class CoverCompletion:
    """Pieces covering V'' u Z' (F-copies, or a loose path from a_2 to a_1)"""
    Zprime: List[int]
    pieces: List[Edge]
    labels: List[str]
    route: str


class _SearchAborted(Exception):
    pass


def _absorb_leftover(H: Hypergraph, F: Hypergraph, L: Sequence[int], Z: Sequence[int], m: int,
                     cfg: PipelineConfig) -> Optional[Tuple[List[Edge], List[int]]]:
    """Cover L by F-copies inside L u Z using at most m Z-vertices, m minus that divisible by f"""
    f = F.n
    rooted = [RootedMotif(F, (role,)) for role in range(f)]
    L_mask = H.vertex_mask(L)
    Z_mask = H.vertex_mask(Z)
    pieces: List[Edge] = []
    consumed: List[int] = []
    nodes = [0]

    def options(l: int) -> List[Tuple[int, Edge, List[int]]]:
        found = []
        pool = L_mask | Z_mask
        for M in rooted:
            try:
                for emb in islice(iter_rooted_copies(H, M, (l,), pool, cfg.search_budget), CANDIDATE_CAP):
                    zs = [v for v in emb.non_root_images if Z_mask[v]]
                    found.append((len(zs), emb.image, zs))
            except BudgetExceededError:
                continue
        found.sort(key=lambda item: (item[0], item[1]))
        return found

    def dfs() -> bool:
        uncovered = np.flatnonzero(L_mask)
        if uncovered.size == 0:
            return len(consumed) <= m and (m - len(consumed)) % f == 0
        l = int(uncovered[0])
        L_mask[l] = False
        for z_count, image, zs in options(l):
            if len(consumed) + z_count > m:
                continue
            nodes[0] += 1
            if nodes[0] > cfg.closing_budget:
                raise _SearchAborted()
            others = [v for v in image if v != l and not Z_mask[v]]
            L_mask[others] = False
            Z_mask[zs] = False
            consumed.extend(zs)
            pieces.append(image)
            if dfs():
                return True
            pieces.pop()
            del consumed[len(consumed) - len(zs):]
            Z_mask[zs] = True
            L_mask[others] = True
        L_mask[l] = True
        return False

    try:
        return (pieces, consumed) if dfs() else None
    except _SearchAborted:
        logger.warning(f"⚠️ Leftover search exceeded {cfg.closing_budget} nodes")
        return None


def _complete_factor(H: Hypergraph, struct: AbsorbingStructure, rest: np.ndarray,
                     cfg: PipelineConfig) -> CoverCompletion:
    F = struct.F
    f, m, n = F.n, struct.m, H.n
    rest_size = int(rest.sum())
    if (rest_size + m) % f:
        raise PhaseFailure("arithmetic", f"|V''| + m = {rest_size + m} is not divisible by {f}")

    tiles, L = greedy_tiling(H, F, rest, cfg)
    limit = cfg.gamma * n if cfg.strict else max(cfg.gamma * n, 2 * f)
    if len(L) >= limit:
        logger.error(f"❌ Greedy tiling left {len(L)} vertices (limit {limit:.1f})")
        raise PhaseFailure("leftover", f"{len(L)} vertices left after greedy tiling", {"limit": limit})
    logger.info(f"🔍 Greedy tiling: {len(tiles)} copies, leftover {len(L)}")

    cover = None
    for attempt in range(cfg.rewind + 1):
        cover = _absorb_leftover(H, F, L, struct.Z, m, cfg)
        if cover is not None or not tiles:
            break
        L = sorted(L + list(tiles.pop()))
        logger.info(f"🔄 Rewound one tile, leftover now {len(L)}")
    if cover is None:
        raise PhaseFailure("absorb_leftover", f"could not cover {len(L)} leftover vertices through Z")
    S1, consumed = cover

    S2: List[Edge] = []
    remaining = H.vertex_mask([z for z in struct.Z if z not in set(consumed)])
    unrooted = RootedMotif(F)
    for _ in range((m - len(consumed)) // f):
        try:
            emb = find_rooted_copy(H, unrooted, (), remaining, cfg.search_budget)
        except BudgetExceededError:
            emb = None
        if emb is None:
            raise PhaseFailure("z_adjust", "no F-copy left inside Z to reach |Z'| = m")
        S2.append(emb.image)
        remaining[list(emb.image)] = False
        consumed.extend(emb.image)

    pieces = list(tiles) + S1 + S2
    labels = ["claim3:tile"] * len(tiles) + ["claim3:leftover"] * len(S1) + ["claim3:z_adjust"] * len(S2)
    return CoverCompletion(sorted(int(z) for z in consumed), pieces, labels, "tiling")


def close_path(H: Hypergraph, x: int, target: int, L: Sequence[int], Z: Sequence[int], m: int,
                budget: int) -> Optional[Tuple[List[Edge], List[int]]]:
    """Loose path from x to target whose interior is all of L plus exactly m vertices of Z"""
    k = H.k
    L_mask = H.vertex_mask(L)
    Z_mask = H.vertex_mask(Z)
    used_z: List[int] = []
    nodes = [0]

    def dfs(end: int) -> Optional[List[Edge]]:
        left = int(L_mask.sum())
        remaining = left + m - len(used_z)
        rows = H.edges[H.incident_edges(end)]
        if remaining == k - 2:
            pool = L_mask | Z_mask if len(used_z) < m else L_mask
            ok = ((rows == target).any(axis=1) & (pool[rows].sum(axis=1) == k - 2)
                  & (L_mask[rows].sum(axis=1) == left))
            hits = rows[ok]
            if hits.shape[0] == 0:
                return None
            row = hits[0].tolist()
            middle = [v for v in row if v not in (end, target)]
            used_z.extend(v for v in middle if Z_mask[v])
            return [tuple([end] + middle + [target])]
        if remaining < k - 2:
            return None
        pool = L_mask | Z_mask if len(used_z) < m else L_mask
        cands = rows[pool[rows].sum(axis=1) == k - 1]
        cands = cands[np.argsort(-L_mask[cands].sum(axis=1), kind="stable")][:CANDIDATE_CAP]
        for row in cands.tolist():
            new = [v for v in row if v != end]
            zs = [v for v in new if Z_mask[v]]
            if len(used_z) + len(zs) > m:
                continue
            ls = [v for v in new if L_mask[v]]
            L_mask[ls] = False
            Z_mask[zs] = False
            used_z.extend(zs)
            for y in new:
                nodes[0] += 1
                if nodes[0] > budget:
                    raise _SearchAborted()
                rest = dfs(y)
                if rest is not None:
                    return [tuple([end] + [v for v in new if v != y] + [y])] + rest
            del used_z[len(used_z) - len(zs):]
            Z_mask[zs] = True
            L_mask[ls] = True
        return None

    try:
        found = dfs(x)
    except _SearchAborted:
        logger.warning(f"⚠️ Closing search exceeded {budget} nodes")
        return None
    return (found, list(used_z)) if found is not None else None


def rewind_path(edges: List[Edge], ends: List[int], available: np.ndarray):
    last = edges.pop()
    ends.pop()
    available[[v for v in last if v != ends[-1]]] = True


def _complete_closing(H: Hypergraph, struct: AbsorbingStructure, rest: np.ndarray,
                      cfg: PipelineConfig) -> CoverCompletion:
    k, m = H.k, struct.m
    a1, a2 = struct.ends
    available = rest.copy()
    edges, ends = greedy_loose_path(H, a2, available, stop_at=CLOSING_RESERVE_EDGES * (k - 1))
    logger.info(f"🔍 Greedy path from a_2: {len(edges)} edges, {int(available.sum())} vertices left")

    for attempt in range(cfg.rewind + 1):
        L = np.flatnonzero(available).tolist()
        found = close_path(H, ends[-1], a1, L, struct.Z, m, cfg.closing_budget)
        if found is not None:
            closing, used_z = found
            pieces = edges + closing
            labels = ["claim3:greedy-path"] * len(edges) + ["claim3:closing"] * len(closing)
            return CoverCompletion(sorted(used_z), pieces, labels, "closing")
        if not edges:
            break
        rewind_path(edges, ends, available)
        logger.info(f"🔄 Rewound one path edge, {int(available.sum())} vertices left")
    raise PhaseFailure("closing", "no closing path through the leftover and exactly m flexible vertices",
                       {"leftover": int(available.sum()), "m": m})


def _complete_connectors(H: Hypergraph, struct: AbsorbingStructure, rest: np.ndarray,
                         cfg: PipelineConfig) -> CoverCompletion:
    k, m = H.k, struct.m
    a1, a2 = struct.ends
    interior = 3 * (k - 1) - 1
    reserved = connector_reserve(k)

    available = rest.copy()
    if not available.any():
        raise PhaseFailure("arithmetic", "no vertices outside the absorbing structure")
    s = int(np.flatnonzero(available)[0])
    edges, ends = greedy_loose_path(H, s, available)
    if not available.any():
        if not edges:
            raise PhaseFailure("arithmetic", "nothing left to patch through Z_1")
        rewind_path(edges, ends, available)
    L = np.flatnonzero(available).tolist()
    patch_cost = (len(L) - 1) * interior
    adjust = m - reserved - patch_cost
    if adjust < 1 or adjust % (k - 1) != 1 % (k - 1) or patch_cost + adjust > len(struct.Z1):
        raise PhaseFailure("arithmetic", f"Z-budget does not balance: |L| = {len(L)}, adjusting segment "
                                         f"needs {adjust} vertices", {"target": m + reserved})

    Z1_mask = H.vertex_mask(struct.Z1)
    patch = cover_small_set(H, L, Z1_mask, "path", None, cfg)
    Z1_mask[list(patch.vertices)] = False
    q = (adjust - 1) // (k - 1)
    if q == 0:
        segment: List[Edge] = []
        z_start = z_end = int(np.flatnonzero(Z1_mask)[0])
    else:
        try:
            emb = find_rooted_copy(H, loose_path(k, q), (), Z1_mask, cfg.search_budget)
        except BudgetExceededError:
            emb = None
        if emb is None:
            raise PhaseFailure("z_adjust", f"no loose path with {q} edges inside Z_1")
        segment = emb.host_edges()
        z_start, z_end = emb.image[0], emb.image[-1]

    pairs = [(a2, s), (ends[-1], L[0]), (L[-1], z_start), (z_end, a1)]
    links = connect_pairs(H, pairs, H.vertex_mask(struct.Z2), cfg.search_budget)
    pieces = links[0] + edges + links[1] + patch.path + links[2] + segment + links[3]
    labels = (["claim3:connector"] * len(links[0]) + ["claim3:greedy-path"] * len(edges)
              + ["claim3:connector"] * len(links[1]) + ["claim3:leftover"] * len(patch.path)
              + ["claim3:connector"] * len(links[2]) + ["claim3:z_adjust"] * len(segment)
              + ["claim3:connector"] * len(links[3]))
    Zset = set(struct.Z)
    consumed = {v for e in pieces for v in e if v in Zset}
    return CoverCompletion(sorted(consumed), pieces, labels, "four-connector")


def connector_reserve(k: int) -> int:
    """Flexible vertices taken by the four length-3 connectors of the Hamilton finish"""
    return 4 * (3 * (k - 1) - 1)


def remaining_vertices(H: Hypergraph, struct: AbsorbingStructure) -> List[int]:
    """V'' = V minus (A u U)"""
    rest = np.ones(H.n, dtype=bool)
    rest[list(struct.vertices)] = False
    return np.flatnonzero(rest).tolist()


def complete_cover(H: Hypergraph, Vrest: Optional[VertexSet], struct: AbsorbingStructure,
                   cfg: Optional[PipelineConfig] = None) -> CoverCompletion:
    """Cover Vrest (default V minus (A u U)) together with exactly m vertices Z' of Z"""
    cfg = cfg or PipelineConfig()
    start = time.perf_counter()
    rest = H.vertex_mask(remaining_vertices(H, struct) if Vrest is None else Vrest)
    if rest[list(struct.vertices)].any():
        raise HypergraphError("Vrest must avoid the absorbing structure")
    if struct.mode == "factor":
        result = _complete_factor(H, struct, rest, cfg)
    else:
        k = H.k
        if (int(rest.sum()) + struct.m + 2) % (k - 1) != 1 % (k - 1):
            raise PhaseFailure("arithmetic", "closing path vertex count is not 1 mod (k-1)")
        if len(struct.Z2) >= connector_reserve(k):
            result = _complete_connectors(H, struct, rest, cfg)
        else:
            result = _complete_closing(H, struct, rest, cfg)
    if len(result.Zprime) != struct.m:
        raise PhaseFailure("arithmetic", f"consumed {len(result.Zprime)} flexible vertices, expected {struct.m}")
    struct.phase_seconds["complete_cover"] = time.perf_counter() - start
    logger.info(f"✅ Cover completed by route '{result.route}' with {len(result.pieces)} pieces")
    return result
