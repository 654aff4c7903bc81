#!/usr/bin/env python3
"""
Edge degrees, edge exposures and (rooted) edge degeneracy
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Set, Tuple, Union

from src.core.errors import HypergraphError
from src.core.hypergraph import Hypergraph, RootedMotif, is_linear, line_graph

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_EDGES = 10


@dataclass
class EdgeExposure:
    """An ordering of E(F) and the weight of every exposed edge"""
    order: List[int]
    weights: List[int] = field(default_factory=list)

    @property
    def max_weight(self) -> int:
        return max(self.weights, default=0)


def _as_motif(M: Union[RootedMotif, Hypergraph]) -> RootedMotif:
    return M if isinstance(M, RootedMotif) else RootedMotif(M)


def _neighbours(F: Hypergraph) -> List[Set[int]]:
    """Line-graph adjacency: edges sharing at least one vertex"""
    adj = [set() for _ in range(F.num_edges)]
    for v in range(F.n):
        inc = F.incident_edges(v).tolist()
        for a in inc:
            adj[a].update(b for b in inc if b != a)
    return adj


def _root_edges(M: RootedMotif) -> Set[int]:
    roots = set(M.roots)
    return {i for i, e in enumerate(M.graph.edge_list()) if roots.intersection(e)}


def edge_degree(F: Hypergraph, e: int) -> int:
    """deg(e) = sum over v in e of (deg_F(v) - 1)"""
    if not is_linear(F):
        raise HypergraphError("edge degree identity requires a linear hypergraph")
    if not 0 <= e < F.num_edges:
        raise HypergraphError(f"edge index {e} out of range")
    return int(sum(F.vertex_degrees[v] - 1 for v in F.edge(e)))


def min_max_edge_degree(F: Hypergraph) -> Tuple[int, int]:
    """(minimum, maximum) edge degree"""
    if F.num_edges == 0:
        raise HypergraphError("edge degrees of an edgeless hypergraph are undefined")
    degrees = [edge_degree(F, e) for e in range(F.num_edges)]
    return min(degrees), max(degrees)


def exposure_weights(F: Hypergraph, order: Sequence[int]) -> List[int]:
    """Number of earlier edges each exposed edge intersects"""
    if sorted(order) != list(range(F.num_edges)):
        raise HypergraphError("order is not a permutation of the edge indices")
    adj = _neighbours(F)
    seen: Set[int] = set()
    weights = []
    for e in order:
        weights.append(len(adj[e] & seen))
        seen.add(e)
    return weights


def respects_roots(M: RootedMotif, order: Sequence[int]) -> bool:
    """Root edges must all be exposed before any root-free edge"""
    root_edges = _root_edges(M)
    seen_free = False
    for e in order:
        if e in root_edges:
            if seen_free:
                return False
        else:
            seen_free = True
    return True


def edge_degeneracy(M: Union[RootedMotif, Hypergraph]) -> Tuple[int, EdgeExposure]:
    """Greedy min-degree peeling; root-free edges are peeled before root edges"""
    M = _as_motif(M)
    F = M.graph
    if F.num_edges == 0:
        return 0, EdgeExposure([], [])

    adj = _neighbours(F)
    degree = [len(a) for a in adj]
    remaining = set(range(F.num_edges))
    root_edges = _root_edges(M)
    deletion: List[int] = []
    degen = 0

    for phase in (remaining - root_edges, set(root_edges)):
        while phase:
            e = min(phase, key=lambda x: (degree[x], x))
            degen = max(degen, degree[e])
            phase.discard(e)
            remaining.discard(e)
            deletion.append(e)
            for nb in adj[e]:
                if nb in remaining:
                    degree[nb] -= 1

    order = deletion[::-1]
    witness = EdgeExposure(order, exposure_weights(F, order))
    return degen, witness


def brute_force_degeneracy(M: Union[RootedMotif, Hypergraph]) -> int:
    """Minimum over root-respecting exposures of the maximum weight"""
    M = _as_motif(M)
    F = M.graph
    if F.num_edges > BRUTE_FORCE_MAX_EDGES:
        raise HypergraphError(f"brute force limited to {BRUTE_FORCE_MAX_EDGES} edges")
    if F.num_edges == 0:
        return 0

    adj = _neighbours(F)
    root_edges = _root_edges(M)
    groups = [sorted(root_edges), sorted(set(range(F.num_edges)) - root_edges)]
    best = [F.num_edges]

    def search(placed: Set[int], group: int, current: int):
        if current >= best[0]:
            return
        while group < 2 and all(e in placed for e in groups[group]):
            group += 1
        if group == 2:
            best[0] = current
            return
        for e in groups[group]:
            if e in placed:
                continue
            w = len(adj[e] & placed)
            placed.add(e)
            search(placed, group, max(current, w))
            placed.discard(e)

    search(set(), 0, 0)
    return best[0]


def line_graph_degeneracy(F: Hypergraph) -> int:
    """Classical vertex degeneracy of the line graph"""
    L = line_graph(F)
    adj = [set() for _ in range(L.n)]
    for a, b in L.edge_list():
        adj[a].add(b)
        adj[b].add(a)
    alive = set(range(L.n))
    best = 0
    while alive:
        v = min(alive, key=lambda x: (len(adj[x] & alive), x))
        best = max(best, len(adj[v] & alive))
        alive.discard(v)
    return best
