#!/usr/bin/env python3
"""
Immutable k-uniform hypergraphs with labelled counting and structural predicates
"""

import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.config import config
from src.core.errors import HypergraphError
from src.core.utils import calculate_hash

logger = logging.getLogger(__name__)

VertexSet = Union[Iterable[int], np.ndarray]

# Edges per batch in the vectorised permanent computation
_COUNT_BATCH = 1 << 20


def max_vertices(k: int) -> int:
    """Largest n whose k-tuples still fit a 63-bit edge code"""
    return math.ceil(2 ** (63 / k)) - 1


class Hypergraph:
    """k-uniform hypergraph on vertices 0..n-1 with sorted, deduplicated edges"""

    def __init__(self, k: int, n: int, edges: Union[Sequence[Sequence[int]], np.ndarray] = (),
                 labels: Optional[Sequence[int]] = None):
        if k < 2:
            raise HypergraphError(f"Uniformity must be at least 2, got {k}")
        if k > config.max_k:
            raise HypergraphError(f"Uniformity {k} exceeds configured maximum {config.max_k}")
        if n < 0:
            raise HypergraphError("Vertex count cannot be negative")
        if n > max_vertices(k):
            raise HypergraphError(f"Edge codes need n^k < 2^63, so k={k} allows n <= {max_vertices(k)}, got n={n}")

        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, k), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != k:
            raise HypergraphError(f"Every edge must have exactly {k} vertices")
        arr = np.sort(arr, axis=1)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise HypergraphError(f"Edge vertex out of range [0, {n})")
        if arr.size and np.any(arr[:, 1:] == arr[:, :-1]):
            raise HypergraphError("Edges must consist of distinct vertices")

        codes = _encode(arr, n)
        order = np.argsort(codes, kind="stable")
        codes = codes[order]
        if codes.size > 1 and np.any(codes[1:] == codes[:-1]):
            raise HypergraphError("Duplicate edge")

        self._k = int(k)
        self._n = int(n)
        self._edges = arr[order].astype(np.int32 if n < 2 ** 31 else np.int64)
        self._edges.setflags(write=False)
        self._codes = codes
        self._codes.setflags(write=False)
        self.labels = tuple(int(x) for x in labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != n:
            raise HypergraphError("Label list must have one entry per vertex")

    # ------------------------------------------------------------------ basics

    @classmethod
    def empty(cls, k: int, n: int) -> "Hypergraph":
        return cls(k, n, ())

    @classmethod
    def from_edges(cls, edges: Sequence[Sequence[int]], n: Optional[int] = None) -> "Hypergraph":
        """Infer k from the first edge and n from the largest vertex unless given"""
        edges = [list(e) for e in edges]
        if not edges:
            raise HypergraphError("Cannot infer uniformity from an empty edge list")
        top = max(max(e) for e in edges) + 1
        return cls(len(edges[0]), top if n is None else n, edges)

    @property
    def k(self) -> int:
        return self._k

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> np.ndarray:
        """Read-only (e(H), k) array of sorted edges in lexicographic order"""
        return self._edges

    @property
    def num_edges(self) -> int:
        return int(self._edges.shape[0])

    def __len__(self) -> int:
        return self.num_edges

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self._k == other._k and self._n == other._n
                and np.array_equal(self._codes, other._codes))

    def __hash__(self):
        return hash((self._k, self._n, self._codes.tobytes()))

    def __repr__(self) -> str:
        return f"Hypergraph(k={self._k}, n={self._n}, edges={self.num_edges})"

    def edge(self, i: int) -> Tuple[int, ...]:
        return tuple(int(v) for v in self._edges[i])

    def edge_list(self) -> List[Tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self._edges]

    def edge_index(self, vertices: Iterable[int]) -> int:
        """Index of the edge with the given vertex set, or -1"""
        verts = sorted(int(v) for v in vertices)
        if len(verts) != self._k or len(set(verts)) != self._k:
            return -1
        if verts[0] < 0 or verts[-1] >= self._n:
            return -1
        code = 0
        for v in verts:
            code = code * self._n + v
        pos = int(np.searchsorted(self._codes, code))
        if pos < self._codes.size and int(self._codes[pos]) == code:
            return pos
        return -1

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return self.edge_index(vertices) >= 0

    # -------------------------------------------------------------- incidence

    @cached_property
    def _incidence_csr(self) -> Tuple[np.ndarray, np.ndarray]:
        flat = self._edges.ravel()
        order = np.argsort(flat, kind="stable")
        edge_ids = (order // self._k).astype(np.int64)
        counts = np.bincount(flat, minlength=self._n) if flat.size else np.zeros(self._n, np.int64)
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, edge_ids

    def incident_edges(self, v: int) -> np.ndarray:
        """Ascending indices of the edges containing v"""
        self._check_vertex(v)
        indptr, ids = self._incidence_csr
        return ids[indptr[v]:indptr[v + 1]]

    @property
    def incidence(self) -> List[frozenset]:
        """Map vertex -> set of incident edge indices"""
        return [frozenset(int(e) for e in self.incident_edges(v)) for v in range(self._n)]

    @cached_property
    def vertex_degrees(self) -> np.ndarray:
        """Number of edges containing each vertex (unlabelled)"""
        indptr, _ = self._incidence_csr
        return np.diff(indptr)

    @cached_property
    def pair_incidence(self) -> np.ndarray:
        """Dense symmetric n x n matrix of pair codegrees (zero diagonal)"""
        n = self._n
        counts = np.zeros(n * n, dtype=np.int64)
        for i, j in combinations(range(self._k), 2):
            codes = self._edges[:, i].astype(np.int64) * n + self._edges[:, j]
            counts += np.bincount(codes, minlength=n * n)
        matrix = counts.reshape(n, n)
        return matrix + matrix.T

    def codegree(self, u: int, v: int) -> int:
        return int(self.pair_incidence[u, v])

    def _check_vertex(self, v: int):
        if not 0 <= int(v) < self._n:
            raise HypergraphError(f"Vertex {v} out of range [0, {self._n})")

    def vertex_mask(self, vertices: VertexSet) -> np.ndarray:
        """Boolean membership mask of a vertex set, with range checking"""
        if isinstance(vertices, np.ndarray) and vertices.dtype == bool:
            if vertices.shape != (self._n,):
                raise HypergraphError("Boolean vertex mask has the wrong length")
            return vertices.copy()
        mask = np.zeros(self._n, dtype=bool)
        idx = np.fromiter((int(v) for v in vertices), dtype=np.int64) \
            if not isinstance(vertices, np.ndarray) else vertices.astype(np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= self._n:
                raise HypergraphError(f"Vertex set contains index outside [0, {self._n})")
            mask[idx] = True
        return mask


@dataclass(frozen=True)
class RootedMotif:
    """Linear k-graph with an ordered root tuple and optional distinguished ends"""
    graph: Hypergraph
    roots: Tuple[int, ...] = ()
    ends: Optional[Tuple[int, int]] = None
    name: str = ""

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def num_vertices(self) -> int:
        return self.graph.n

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges

    @property
    def non_root_count(self) -> int:
        return self.graph.n - len(self.roots)

    def with_roots(self, roots: Sequence[int], ends: Optional[Tuple[int, int]] = None) -> "RootedMotif":
        return RootedMotif(self.graph, tuple(int(r) for r in roots),
                           ends if ends is not None else self.ends, self.name)


@dataclass
class DegreeReport:
    """Aggregate degree statistics of a hypergraph"""
    min_vertex_degree: int
    max_pair_degree: int
    density: float
    n: int = 0
    k: int = 0
    num_edges: int = 0
    notes: List[str] = field(default_factory=list)


# ---------------------------------------------------------------- counting


def _encode(arr: np.ndarray, n: int) -> np.ndarray:
    codes = np.zeros(arr.shape[0], dtype=np.int64)
    for j in range(arr.shape[1]):
        codes = codes * n + arr[:, j]
    return codes


def _permanent_counts(rows: np.ndarray, masks: Sequence[np.ndarray]) -> int:
    """Sum over edges of perm(M_e), M_e[i, j] = [edge vertex j in A_i] (Ryser)"""
    k = len(masks)
    total = 0
    subsets = [[j for j in range(k) if bits >> j & 1] for bits in range(1, 1 << k)]
    for start in range(0, rows.shape[0], _COUNT_BATCH):
        chunk = rows[start:start + _COUNT_BATCH]
        member = np.stack([mask[chunk] for mask in masks], axis=1).astype(np.int64)
        # edges where some row has no admissible column contribute nothing
        keep = member.any(axis=2).all(axis=1) & member.any(axis=1).all(axis=1)
        member = member[keep]
        if member.shape[0] == 0:
            continue
        acc = np.zeros(member.shape[0], dtype=np.int64)
        for cols in subsets:
            sign = -1 if (k - len(cols)) % 2 else 1
            acc += sign * member[:, :, cols].sum(axis=2).prod(axis=1)
        total += int(acc.sum())
    return total


def labelled_edge_count(H: Hypergraph, *sets: VertexSet) -> int:
    """e(A_1,...,A_k): ordered k-tuples with i-th entry in A_i forming an edge"""
    if len(sets) != H.k:
        raise HypergraphError(f"Expected {H.k} vertex sets, got {len(sets)}")
    masks = [H.vertex_mask(s) for s in sets]
    return _permanent_counts(H.edges, masks)


def degree_into(H: Hypergraph, v: int, *sets: VertexSet) -> int:
    """deg(v; U_1,...,U_{k-1}) = e({v}, U_1, ..., U_{k-1})"""
    if len(sets) != H.k - 1:
        raise HypergraphError(f"Expected {H.k - 1} vertex sets, got {len(sets)}")
    H._check_vertex(v)
    rows = H.edges[H.incident_edges(v)]
    masks = [H.vertex_mask([v])] + [H.vertex_mask(s) for s in sets]
    return _permanent_counts(rows, masks)


def degree_vector(H: Hypergraph, S: VertexSet) -> np.ndarray:
    """Labelled degrees deg(v; S,...,S) of every vertex at once"""
    in_s = H.vertex_mask(S)
    degrees = np.zeros(H.n, dtype=np.int64)
    if H.num_edges == 0:
        return degrees
    member = in_s[H.edges]
    inside = member.sum(axis=1)
    for j in range(H.k):
        ok = (inside - member[:, j]) == H.k - 1
        degrees += np.bincount(H.edges[ok, j], minlength=H.n)
    return degrees * math.factorial(H.k - 1)


def edge_density(H: Hypergraph) -> float:
    """p-hat = k! e(H) / n^k, the share of ordered k-tuples that form an edge"""
    if H.n == 0:
        return 0.0
    return math.factorial(H.k) * H.num_edges / float(H.n) ** H.k


def degree_report(H: Hypergraph) -> DegreeReport:
    """Minimum labelled vertex degree, maximum pair degree and density"""
    k, n = H.k, H.n
    if n == 0:
        return DegreeReport(0, 0, 0.0, n=n, k=k)
    degs = H.vertex_degrees * math.factorial(k - 1)
    min_deg = int(degs.min()) if degs.size else 0
    max_pair = 0
    if H.num_edges:
        max_pair = int(H.pair_incidence.max())
    density = edge_density(H)
    report = DegreeReport(min_deg, max_pair, density, n=n, k=k, num_edges=H.num_edges)
    if min_deg > math.factorial(k) * H.num_edges * k / n:
        report.notes.append("minimum degree above average bound")
    return report


# -------------------------------------------------------------- predicates


def is_linear(H: Hypergraph) -> bool:
    """True iff any two edges share at most one vertex"""
    if H.num_edges < 2:
        return True
    return int(H.pair_incidence.max()) <= 1


def line_graph(H: Hypergraph) -> Hypergraph:
    """Graph on E(H) joining intersecting edges"""
    pairs = set()
    for v in range(H.n):
        inc = H.incident_edges(v)
        for a, b in combinations(inc.tolist(), 2):
            pairs.add((a, b))
    return Hypergraph(2, H.num_edges, sorted(pairs))


def induced(H: Hypergraph, S: VertexSet) -> Hypergraph:
    """H[S], re-indexed; `labels` maps new indices back to the originals"""
    mask = H.vertex_mask(S)
    keep_vertices = np.flatnonzero(mask)
    new_index = -np.ones(H.n, dtype=np.int64)
    new_index[keep_vertices] = np.arange(keep_vertices.size)
    rows = H.edges[mask[H.edges].all(axis=1)] if H.num_edges else H.edges
    base = H.labels
    labels = [base[v] for v in keep_vertices] if base is not None else keep_vertices.tolist()
    return Hypergraph(H.k, int(keep_vertices.size), new_index[rows], labels=labels)


def edges_inside(H: Hypergraph, S: VertexSet) -> np.ndarray:
    """Indices of edges entirely inside S"""
    mask = H.vertex_mask(S)
    if H.num_edges == 0:
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(mask[H.edges].all(axis=1))


def validate_rooted(M: RootedMotif) -> Tuple[bool, List[str]]:
    """Check linearity, root separation and root/end disjointness"""
    violations: List[str] = []
    G = M.graph
    if not is_linear(G):
        violations.append("motif graph is not linear")
    if len(set(M.roots)) != len(M.roots):
        violations.append(f"roots are not distinct: {M.roots}")
    for r in M.roots:
        if not 0 <= r < G.n:
            violations.append(f"root {r} out of range")
    if violations:
        return False, violations

    edge_sets = [set(e) for e in G.edge_list()]
    for a, b in combinations(range(len(M.roots)), 2):
        xa, xb = M.roots[a], M.roots[b]
        for i, ei in enumerate(edge_sets):
            if xa not in ei:
                continue
            for j, ej in enumerate(edge_sets):
                if xb in ej and ei & ej:
                    violations.append(
                        f"edges {i} (root {xa}) and {j} (root {xb}) intersect")
    if M.ends is not None:
        if len(M.ends) != 2:
            violations.append("ends must be a pair")
        elif set(M.ends) & set(M.roots):
            violations.append(f"ends {M.ends} meet roots {M.roots}")
    return len(violations) == 0, violations


# ---------------------------------------------------------------- .hg files


def format_hg(H: Hypergraph, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"{H.k} {H.n}")
    lines.extend(" ".join(str(int(v)) for v in row) for row in H.edges)
    return "\n".join(lines) + "\n"


def parse_hg(text: str) -> Hypergraph:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise HypergraphError(f"line {lineno}: non-integer token")
        if header is None:
            if len(values) != 2:
                raise HypergraphError(f"line {lineno}: header must be 'k n'")
            header = values
            continue
        if len(values) != header[0]:
            raise HypergraphError(f"line {lineno}: expected {header[0]} vertices")
        edges.append(values)
    if header is None:
        raise HypergraphError("missing 'k n' header")
    return Hypergraph(header[0], header[1], edges)


def read_hg(path: Union[str, Path]) -> Hypergraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise HypergraphError(f"{path}: not UTF-8 text (byte {e.start})")
    return parse_hg(text)


def write_hg(H: Hypergraph, path: Union[str, Path], comment: Optional[str] = None) -> Path:
    path = Path(path)
    path.write_text(format_hg(H, comment))
    logger.info(f"✅ Wrote {H} to {path}")
    return path


def content_digest(H: Hypergraph) -> str:
    """Digest of the canonical .hg text (comments excluded)"""
    return calculate_hash(format_hg(H))
