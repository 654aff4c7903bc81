#!/usr/bin/env python3
"""
Loose path and loose cycle checks on explicit edge sequences
"""

from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Set, Tuple

Edge = Sequence[int]


def _positions(edges: Sequence[Edge]) -> Dict[int, List[int]]:
    where: Dict[int, List[int]] = defaultdict(list)
    for pos, e in enumerate(edges):
        for v in e:
            where[int(v)].append(pos)
    return where


def check_loose_path(edges: Sequence[Edge], ends: Optional[Tuple[int, int]] = None) -> List[str]:
    """Violations of: consecutive edges meet in one vertex, others are disjoint, ends sit at the extremes"""
    violations: List[str] = []
    edges = [tuple(int(v) for v in e) for e in edges]
    for pos, e in enumerate(edges):
        if len(set(e)) != len(e):
            violations.append(f"edge {pos} repeats a vertex")
    where = _positions(edges)
    for v, pos in where.items():
        if len(pos) > 2 or (len(pos) == 2 and pos[1] - pos[0] != 1):
            violations.append(f"vertex {v} lies in edges {pos}")
    for i in range(len(edges) - 1):
        shared = set(edges[i]) & set(edges[i + 1])
        if len(shared) != 1:
            violations.append(f"edges {i} and {i + 1} share {len(shared)} vertices")

    if ends is not None:
        y1, y2 = int(ends[0]), int(ends[1])
        if not edges:
            if y1 != y2:
                violations.append("empty path must have equal ends")
        else:
            if y1 not in edges[0] or where.get(y1) != [0]:
                violations.append(f"start {y1} is not an end vertex of the first edge")
            last = len(edges) - 1
            if y2 not in edges[-1] or where.get(y2) != [last]:
                violations.append(f"end {y2} is not an end vertex of the last edge")
            if y1 == y2:
                violations.append("a path with edges needs distinct ends")
    return violations


def check_loose_cycle(edges: Sequence[Edge]) -> List[str]:
    """Violations of the loose cycle conditions (cyclic consecutive edges meet in one vertex)"""
    violations: List[str] = []
    edges = [tuple(int(v) for v in e) for e in edges]
    t = len(edges)
    if t < 3:
        return [f"a loose cycle needs at least 3 edges, got {t}"]
    for pos, e in enumerate(edges):
        if len(set(e)) != len(e):
            violations.append(f"edge {pos} repeats a vertex")
    for v, pos in _positions(edges).items():
        if len(pos) > 2:
            violations.append(f"vertex {v} lies in edges {pos}")
        elif len(pos) == 2 and (pos[1] - pos[0]) not in (1, t - 1):
            violations.append(f"vertex {v} lies in non-consecutive edges {pos}")
    for i in range(t):
        shared = set(edges[i]) & set(edges[(i + 1) % t])
        if len(shared) != 1:
            violations.append(f"edges {i} and {(i + 1) % t} share {len(shared)} vertices")
    return violations


def path_vertices(edges: Sequence[Edge]) -> Set[int]:
    return {int(v) for e in edges for v in e}


def orient_path(edges: Sequence[Edge], start: int) -> List[Tuple[int, ...]]:
    """Return the edge sequence so that it begins at `start` (reversing if needed)"""
    edges = [tuple(e) for e in edges]
    if not edges or start in edges[0]:
        return edges
    return edges[::-1]
