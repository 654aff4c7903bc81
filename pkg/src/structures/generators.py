#!/usr/bin/env python3
"""
Seeded random hypergraphs and the motif library
"""

import math
import re
import logging
from typing import List, Optional

import numpy as np

from src.core.errors import HypergraphError
from src.core.hypergraph import Hypergraph, RootedMotif, VertexSet
from src.core.models import GenSpec

logger = logging.getLogger(__name__)

_MOTIF_PATTERN = re.compile(r"^(single_edge|loose_triangle|loose_path|loose_cycle|star|matching)(?:_(\d+))?$")


def rng_for(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed"""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def random_streams(seed: int, count: int) -> List[np.random.Generator]:
    """Independent child streams of one seed (SeedSequence.spawn), stable in count order"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(int(seed)).spawn(count)]


def _unrank_colex(ranks: np.ndarray, n: int, k: int) -> np.ndarray:
    """k-subsets of [0, n) with the given colexicographic ranks"""
    out = np.empty((ranks.size, k), dtype=np.int64)
    remaining = ranks.astype(np.int64).copy()
    for i in range(k, 0, -1):
        table = np.array([math.comb(c, i) for c in range(n + 1)], dtype=np.int64)
        c = np.searchsorted(table, remaining, side="right") - 1
        out[:, k - i] = c
        remaining -= table[c]
    return out


def random_kgraph(spec: GenSpec) -> Hypergraph:
    """Binomial random k-graph: every k-set is an edge independently with probability p"""
    k, n, p = spec.k, spec.n, spec.p
    total = math.comb(n, k)
    if total >= 2 ** 62:
        raise HypergraphError(f"C({n},{k}) too large to sample by rank")
    rng = rng_for(spec.seed)
    count = int(rng.binomial(total, p)) if 0.0 < p < 1.0 else (total if p >= 1.0 else 0)
    if count == 0:
        return Hypergraph.empty(k, n)
    if count == total:
        ranks = np.arange(total, dtype=np.int64)
    else:
        ranks = np.sort(rng.choice(total, size=count, replace=False).astype(np.int64))
    H = Hypergraph(k, n, _unrank_colex(ranks, n, k))
    logger.info(f"✅ Generated random {k}-graph n={n} p={p} seed={spec.seed}: {H.num_edges} edges")
    return H


def loose_path(k: int, t: int) -> RootedMotif:
    """Loose path with t edges; ends are its first and last vertex"""
    if k < 2 or t < 1:
        raise HypergraphError("loose path needs k >= 2 and t >= 1")
    n = t * (k - 1) + 1
    edges = [[i * (k - 1) + j for j in range(k)] for i in range(t)]
    return RootedMotif(Hypergraph(k, n, edges), (), (0, n - 1), name=f"loose_path_{t}")


def loose_cycle(k: int, t: int) -> Hypergraph:
    """Loose cycle with t edges on t(k-1) vertices"""
    if t < 3:
        raise HypergraphError("loose cycle needs at least 3 edges")
    if k < 2:
        raise HypergraphError("uniformity must be at least 2")
    n = t * (k - 1)
    edges = [[(i * (k - 1) + j) % n for j in range(k)] for i in range(t)]
    return Hypergraph(k, n, edges)


def loose_cycle_motif(k: int, t: int) -> RootedMotif:
    return RootedMotif(loose_cycle(k, t), name=f"loose_cycle_{t}")


def star(k: int, s: int) -> Hypergraph:
    """s edges sharing exactly the center vertex 0"""
    if s < 1:
        raise HypergraphError("star needs at least one edge")
    edges = [[0] + [1 + i * (k - 1) + j for j in range(k - 1)] for i in range(s)]
    return Hypergraph(k, 1 + s * (k - 1), edges)


def matching(k: int, s: int) -> Hypergraph:
    """s pairwise disjoint edges"""
    if s < 1:
        raise HypergraphError("matching needs at least one edge")
    return Hypergraph(k, s * k, [[i * k + j for j in range(k)] for i in range(s)])


def motif(name: str, k: int, size: Optional[int] = None) -> RootedMotif:
    """Named linear motif with empty roots"""
    match = _MOTIF_PATTERN.match(name)
    if not match:
        raise HypergraphError(f"Unknown motif '{name}'")
    base, suffix = match.group(1), match.group(2)
    count = int(suffix) if suffix else size

    if base == "single_edge":
        return RootedMotif(Hypergraph(k, k, [list(range(k))]), name="single_edge")
    if base == "loose_triangle":
        return RootedMotif(loose_cycle(k, 3), name="loose_triangle")
    if count is None:
        raise HypergraphError(f"Motif '{name}' needs a size")
    if base == "loose_path":
        return loose_path(k, count)
    if base == "loose_cycle":
        return loose_cycle_motif(k, count)
    if base == "star":
        return RootedMotif(star(k, count), name=f"star_{count}")
    return RootedMotif(matching(k, count), name=f"matching_{count}")


def plant_hole(H: Hypergraph, S: VertexSet) -> Hypergraph:
    """Delete every edge lying entirely inside S"""
    mask = H.vertex_mask(S)
    if H.num_edges == 0:
        return H
    keep = ~mask[H.edges].all(axis=1)
    return Hypergraph(H.k, H.n, H.edges[keep])
