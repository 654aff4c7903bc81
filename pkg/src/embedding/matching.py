#!/usr/bin/env python3
"""
Maximum-cardinality bipartite matching (Hopcroft-Karp)
"""

from collections import deque
from typing import Dict, List, Sequence, Tuple

NIL = -1


class BipartiteGraph:
    """Bipartite graph with left vertices 0..num_left-1 and right vertices 0..num_right-1"""

    def __init__(self, num_left: int, num_right: int, edges: Sequence[Tuple[int, int]]):
        if num_left < 0 or num_right < 0:
            raise ValueError("part sizes must be non-negative")
        self.num_left = num_left
        self.num_right = num_right
        self.adj_left: List[List[int]] = [[] for _ in range(num_left)]
        seen = set()
        for u, v in edges:
            if not (0 <= u < num_left and 0 <= v < num_right):
                raise ValueError(f"edge ({u}, {v}) outside the parts")
            if (u, v) not in seen:
                seen.add((u, v))
                self.adj_left[u].append(v)
        for adj in self.adj_left:
            adj.sort()


class HopcroftKarp:
    """Phases of BFS layering followed by vertex-disjoint shortest augmenting paths"""

    def __init__(self, graph: BipartiteGraph):
        self.graph = graph
        self.match_left = [NIL] * graph.num_left
        self.match_right = [NIL] * graph.num_right
        self.dist: Dict[int, int] = {}

    def _layer(self) -> bool:
        """BFS from free left vertices; True if some free right vertex is reachable"""
        queue = deque()
        inf = self.graph.num_left + 1
        for u in range(self.graph.num_left):
            if self.match_left[u] == NIL:
                self.dist[u] = 0
                queue.append(u)
            else:
                self.dist[u] = inf
        self.dist[NIL] = inf
        while queue:
            u = queue.popleft()
            if self.dist[u] < self.dist[NIL]:
                for v in self.graph.adj_left[u]:
                    w = self.match_right[v]
                    if self.dist[w] == inf:
                        self.dist[w] = self.dist[u] + 1
                        queue.append(w)
        return self.dist[NIL] != inf

    def _augment(self, root: int) -> bool:
        """Iterative DFS along the BFS layers; flips one augmenting path"""
        inf = self.graph.num_left + 1
        stack = [(root, iter(self.graph.adj_left[root]))]
        trail: List[Tuple[int, int]] = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = self.match_right[v]
                if w == NIL:
                    if self.dist[NIL] == self.dist[u] + 1:
                        trail.append((u, v))
                        for a, b in trail:
                            self.match_left[a] = b
                            self.match_right[b] = a
                        return True
                elif self.dist[w] == self.dist[u] + 1:
                    trail.append((u, v))
                    stack.append((w, iter(self.graph.adj_left[w])))
                    advanced = True
                    break
            if not advanced:
                self.dist[u] = inf
                stack.pop()
                if trail:
                    trail.pop()
        return False

    def __call__(self) -> List[Tuple[int, int]]:
        self.match_left = [NIL] * self.graph.num_left
        self.match_right = [NIL] * self.graph.num_right
        self.dist = {}
        while self._layer():
            for u in range(self.graph.num_left):
                if self.match_left[u] == NIL:
                    self._augment(u)
        return [(u, v) for u, v in enumerate(self.match_left) if v != NIL]


def maximum_matching(num_left: int, num_right: int, edges: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    return HopcroftKarp(BipartiteGraph(num_left, num_right, edges))()
