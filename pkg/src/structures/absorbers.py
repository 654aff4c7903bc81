#!/usr/bin/env python3
"""
Grid F-factor absorbers and path absorbers built from absorbing gadgets
"""

import logging
from itertools import permutations
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.errors import HypergraphError
from src.core.hypergraph import Hypergraph, RootedMotif, is_linear, validate_rooted
from src.structures.degeneracy import edge_degeneracy, min_max_edge_degree
from src.structures.paths import check_loose_path, path_vertices

logger = logging.getLogger(__name__)


# ------------------------------------------------------------ factor absorber


@dataclass
class FactorAbsorber:
    """Absorber (A_F, X): grid on Z_f x Z_f, rows and diagonals are copies of F"""
    motif: RootedMotif
    complete_factor: List[Tuple[int, ...]]
    internal_factor: List[Tuple[int, ...]]
    source: Hypergraph

    @property
    def f(self) -> int:
        return self.source.n


def degeneracy_bound(F: Hypergraph) -> int:
    """degen(F) + max edge degree + k, the bound the grid absorber obeys"""
    if F.num_edges == 0:
        return F.k
    degen, _ = edge_degeneracy(F)
    _, max_deg = min_max_edge_degree(F)
    return degen + max_deg + F.k


def build_factor_absorber(F: Hypergraph) -> FactorAbsorber:
    """Grid construction: vertex (i, l) is i*f + l; roots are the diagonal (i, i)"""
    if not is_linear(F):
        raise HypergraphError("factor absorbers need a linear F")
    f, k = F.n, F.k
    if f < k:
        raise HypergraphError("F must have at least k vertices")
    base = F.edge_list()

    edges = []
    complete, internal = [], []
    for i in range(f):
        edges.extend([i * f + v for v in e] for e in base)
        complete.append(tuple(i * f + l for l in range(f)))
    for j in range(1, f):
        edges.extend([((v - j) % f) * f + v for v in e] for e in base)
        internal.append(tuple(((l - j) % f) * f + l for l in range(f)))

    roots = tuple(i * f + i for i in range(f))
    motif = RootedMotif(Hypergraph(k, f * f, edges), roots, name="factor_absorber")
    return FactorAbsorber(motif, complete, internal, F)


def _copy_violations(G: Hypergraph, F: Hypergraph, piece: Sequence[int], label: str) -> List[str]:
    if len(piece) != F.n:
        return [f"{label}: has {len(piece)} vertices, expected {F.n}"]
    missing = [e for e in F.edge_list() if not G.has_edge(piece[v] for v in e)]
    if missing:
        return [f"{label}: F-edges {missing} not present"]
    return []


def _cover_violations(pieces: Sequence[Sequence[int]], target: set, label: str) -> List[str]:
    seen: Dict[int, int] = {}
    out = []
    for idx, piece in enumerate(pieces):
        for v in piece:
            if v in seen:
                out.append(f"{label}: vertex {v} in pieces {seen[v]} and {idx}")
            seen[v] = idx
    if set(seen) != target:
        out.append(f"{label}: covers {len(seen)} vertices, expected exactly {len(target)}")
    return out


def verify_factor_absorber(a: FactorAbsorber) -> Tuple[bool, List[str]]:
    """Check sizes, linearity, rootedness, both factors and the degeneracy bound"""
    violations: List[str] = []
    G, f = a.motif.graph, a.f
    if G.n != f * f:
        violations.append(f"|V| = {G.n}, expected {f * f}")
    if len(a.motif.roots) != f:
        violations.append(f"{len(a.motif.roots)} roots, expected {f}")
    ok, rooted = validate_rooted(a.motif)
    violations.extend(rooted)
    if not ok:
        return False, violations

    for idx, piece in enumerate(a.complete_factor):
        violations.extend(_copy_violations(G, a.source, piece, f"complete piece {idx}"))
    violations.extend(_cover_violations(a.complete_factor, set(range(G.n)), "complete factor"))
    for idx, piece in enumerate(a.internal_factor):
        violations.extend(_copy_violations(G, a.source, piece, f"internal piece {idx}"))
    violations.extend(_cover_violations(a.internal_factor, set(range(G.n)) - set(a.motif.roots),
                                        "internal factor"))

    degen, _ = edge_degeneracy(a.motif)
    bound = degeneracy_bound(a.source)
    if degen > bound:
        violations.append(f"edge degeneracy {degen} exceeds bound {bound}")
    return len(violations) == 0, violations


# -------------------------------------------------------------- path absorber


@dataclass
class GadgetDescriptor:
    """One absorbing gadget: its shared blocks, private C-block and edges"""
    index: int
    A: List[int]
    A_prime: List[int]
    B: List[int]
    C: Dict[str, int]
    edges: Dict[str, int]


@dataclass
class PathAbsorber:
    """Path absorber (P, X, y1, y2) with its two spanning loose paths"""
    motif: RootedMotif
    complete_path: List[int]
    internal_path: List[int]
    gadgets: List[GadgetDescriptor]
    connectors: List[int]
    labels: List[tuple] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.motif.k

    def path_edges(self, which: str) -> List[Tuple[int, ...]]:
        order = self.complete_path if which == "complete" else self.internal_path
        return [self.motif.graph.edge(i) for i in order]


def path_absorber_order(k: int) -> int:
    return 9 * k * k - 23 * k + 15


class _Labeller:
    """Dense indices for labelled vertices, in creation order"""

    def __init__(self):
        self.index: Dict[tuple, int] = {}

    def __call__(self, *label) -> int:
        if label not in self.index:
            self.index[label] = len(self.index)
        return self.index[label]


def build_path_absorber(k: int) -> PathAbsorber:
    """Gadgets P_1..P_{2k-3} linked by connectors h_1..h_{2k-4}"""
    if k < 3:
        raise HypergraphError("path absorbers need k >= 3")
    q = k - 1
    last = 2 * k - 3
    vid = _Labeller()

    xs = [vid("x", i) for i in range(1, k)]
    for i in range(1, k):
        for j in range(1, k):
            if i % q not in (j % q, (j - 1) % q):
                vid("u", i, j)
    for i in range(1, k):
        for j in range(k, last + 1):
            vid("v", i, j)
    for i in range(k, last + 1):
        for j in range(k, last + 1):
            if i != j:
                vid("w", i, j)

    def blocks(i: int) -> Tuple[List[int], List[int], List[int]]:
        if i <= q:
            A = [vid("x", i)] + [vid("u", i, l) for l in range(1, k) if l % q not in (i % q, (i + 1) % q)]
            A_prime = [vid("v", i, l) for l in range(k, last + 1)]
            B = [vid("u", l, i) for l in range(1, k) if l % q not in ((i - 1) % q, i % q)]
        else:
            A = [vid("v", i - k + 1, i)] + [vid("w", i, l) for l in range(k, last + 1) if l != i]
            A_prime = [vid("v", l, i) for l in range(1, k) if l != i - k + 1]
            B = [vid("w", l, i) for l in range(k, last + 1) if l != i]
        return A, A_prime, B

    raw_edges: Dict[tuple, List[int]] = {}
    gadget_parts = []
    for i in range(1, last + 1):
        A, A_prime, B = blocks(i)
        C = {f"c{j}": vid("c", i, j) for j in range(1, k + 1)}
        C.update({f"c'{j}": vid("c'", i, j) for j in range(1, k + 1)})
        C["c*"] = vid("c*", i)
        raw_edges[("e", i)] = [C["c2"], C["c*"]] + A
        raw_edges[("e'", i)] = [C["c'2"], C["c*"]] + A_prime
        raw_edges[("f", i)] = [C[f"c{j}"] for j in range(1, k + 1)]
        raw_edges[("f'", i)] = [C[f"c'{j}"] for j in range(1, k + 1)]
        raw_edges[("g", i)] = [C[f"c{k}"], C["c*"], C["c'1"]] + B
        gadget_parts.append((i, A, A_prime, B, C))
    for i in range(1, last):
        D = [vid("d", i, j) for j in range(1, k - 1)]
        raw_edges[("h", i)] = [vid("c'", i, k), vid("c", i + 1, 1)] + D

    labels = [None] * len(vid.index)
    for label, idx in vid.index.items():
        labels[idx] = label

    G = Hypergraph(k, len(labels), list(raw_edges.values()))
    eid = {name: G.edge_index(vs) for name, vs in raw_edges.items()}

    def outer(i):
        return [eid[("f", i)], eid[("e", i)], eid[("e'", i)], eid[("f'", i)]]

    def inner(i):
        return [eid[("f", i)], eid[("g", i)], eid[("f'", i)]]

    complete, internal = [], []
    for i in range(1, last + 1):
        complete.extend(outer(i) if i <= q else inner(i))
        internal.extend(inner(i) if i <= q else outer(i))
        if i < last:
            complete.append(eid[("h", i)])
            internal.append(eid[("h", i)])

    gadgets = [
        GadgetDescriptor(i, A, A_prime, B, C,
                         {name: eid[(name, i)] for name in ("e", "e'", "f", "f'", "g")})
        for i, A, A_prime, B, C in gadget_parts
    ]
    ends = (vid("c", 1, 1), vid("c'", last, k))
    motif = RootedMotif(G, tuple(xs), ends, name=f"path_absorber_{k}")
    return PathAbsorber(motif, complete, internal, gadgets,
                        [eid[("h", i)] for i in range(1, last)], labels)


def verify_path_absorber(a: PathAbsorber) -> Tuple[bool, List[str]]:
    """Check sizes, rootedness, degeneracy, gadget blocks and both spanning paths"""
    violations: List[str] = []
    G, k = a.motif.graph, a.k
    if G.n != path_absorber_order(k):
        violations.append(f"|V| = {G.n}, expected {path_absorber_order(k)}")
    if len(a.motif.roots) != k - 1:
        violations.append(f"{len(a.motif.roots)} roots, expected {k - 1}")
    if a.motif.ends is None:
        return False, violations + ["path absorber needs ends"]
    ok, rooted = validate_rooted(a.motif)
    violations.extend(rooted)
    if not ok:
        return False, violations

    degen, _ = edge_degeneracy(a.motif)
    if degen > k - 1:
        violations.append(f"edge degeneracy {degen} exceeds {k - 1}")

    for g in a.gadgets:
        sizes = (len(g.A), len(g.A_prime), len(g.B), len(g.C))
        if sizes != (k - 2, k - 2, k - 3, 2 * k + 1):
            violations.append(f"gadget {g.index}: block sizes {sizes}")
        for name, idx in g.edges.items():
            if not 0 <= idx < G.num_edges:
                violations.append(f"gadget {g.index}: edge {name} missing")

    everything = set(range(G.n))
    for which, target in (("complete", everything), ("internal", everything - set(a.motif.roots))):
        order = a.complete_path if which == "complete" else a.internal_path
        if any(not 0 <= i < G.num_edges for i in order):
            violations.append(f"{which} path refers to unknown edges")
            continue
        edges = a.path_edges(which)
        violations.extend(f"{which} path: {msg}" for msg in check_loose_path(edges, a.motif.ends))
        covered = path_vertices(edges)
        if covered != target:
            violations.append(f"{which} path covers {len(covered)} vertices, expected {len(target)}")
    return len(violations) == 0, violations


def absorber_summary(a) -> Dict[str, object]:
    """JSON sidecar content for either absorber kind"""
    data: Dict[str, object] = {
        "k": a.motif.k,
        "n": a.motif.graph.n,
        "roots": list(a.motif.roots),
        "edges": [list(e) for e in a.motif.graph.edge_list()],
    }
    if isinstance(a, FactorAbsorber):
        data["complete_factor"] = [list(p) for p in a.complete_factor]
        data["internal_factor"] = [list(p) for p in a.internal_factor]
    else:
        data["ends"] = list(a.motif.ends)
        data["complete_path"] = [list(e) for e in a.path_edges("complete")]
        data["internal_path"] = [list(e) for e in a.path_edges("internal")]
    return data


def absorber_degeneracy(a) -> int:
    degen, _ = edge_degeneracy(a.motif)
    return degen


def find_piece_order(G: Hypergraph, F: Hypergraph, piece: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Order the vertices of `piece` so that position l plays F-vertex l, if possible"""
    if len(piece) != F.n:
        return None
    base = F.edge_list()
    for perm in permutations(piece):
        if all(G.has_edge(perm[v] for v in e) for e in base):
            return tuple(perm)
    return None
