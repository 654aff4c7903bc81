#!/usr/bin/env python3
"""
(r, m)-templates: randomized construction, flexibility verification and placement
"""

import math
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from src.core.config import config
from src.core.errors import BudgetExceededError, CertificateError, HypergraphError, TemplateConstructionError
from src.core.models import FlexibilityReport
from src.embedding.matching import maximum_matching
from src.structures.generators import rng_for

logger = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 40
DEFAULT_START_ROUNDS = 2


@dataclass
class Template:
    """r-partite r-graph on abstract vertices.

    Y_0 = [0, 4m) with flexible set Z = [0, 2m); Y_1 = [4m, 7m); Y_i for i >= 2
    is the block of clones offset by 3m(i - 1). Edges are ordered r-tuples with
    the Y_0 coordinate first.
    """
    r: int
    m: int
    edges: np.ndarray
    flexible: Tuple[int, ...] = ()
    stats: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, self.r)
        if not self.flexible:
            self.flexible = tuple(range(2 * self.m))

    @property
    def num_vertices(self) -> int:
        return 4 * self.m + 3 * self.m * (self.r - 1)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def part(self, i: int) -> range:
        if i == 0:
            return range(0, 4 * self.m)
        start = 4 * self.m + 3 * self.m * (i - 1)
        return range(start, start + 3 * self.m)

    @property
    def parts(self) -> List[range]:
        return [self.part(i) for i in range(self.r)]

    @property
    def max_degree(self) -> int:
        if self.num_edges == 0:
            return 0
        return int(np.bincount(self.edges.ravel(), minlength=self.num_vertices).max())

    def clone(self, b: int, i: int) -> int:
        """Copy of the Y_1 vertex b inside Y_i"""
        return b + 3 * self.m * (i - 1)

    def edge_list(self) -> List[Tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.edges]


def structure_violations(T: Template) -> List[str]:
    """Part sizes, transversality and the flexible-set contract"""
    violations = []
    if len(T.flexible) != 2 * T.m or not set(T.flexible) <= set(T.part(0)):
        violations.append("flexible set must be 2m vertices of Y_0")
    for i in range(T.r):
        col = T.edges[:, i] if T.num_edges else np.empty(0, dtype=np.int64)
        part = T.part(i)
        if col.size and (col.min() < part.start or col.max() >= part.stop):
            violations.append(f"coordinate {i} leaves part Y_{i}")
    return violations


# ------------------------------------------------------------------ matching


def _base_pairs(T: Template) -> np.ndarray:
    """(Y_0, Y_1-local) pairs of the 2-uniform projection, checking the clone structure"""
    if T.r < 2:
        raise HypergraphError("templates have uniformity at least 2")
    base = T.edges[:, 1] - 4 * T.m
    for i in range(2, T.r):
        if not np.array_equal(T.edges[:, i], T.edges[:, 1] + 3 * T.m * (i - 1)):
            raise HypergraphError("template edges are not clone extensions of a 2-uniform base")
    return np.stack([T.edges[:, 0], base], axis=1)


def _matching_violations(T: Template, edges: Sequence[Tuple[int, ...]], removed: set) -> List[str]:
    violations = []
    covered: Dict[int, int] = {}
    known = {tuple(e) for e in T.edge_list()}
    for idx, e in enumerate(edges):
        if tuple(e) not in known:
            violations.append(f"matching edge {e} is not a template edge")
        for i, v in enumerate(e):
            if v not in T.part(i):
                violations.append(f"matching edge {e} is not transversal")
            if v in covered:
                violations.append(f"vertex {v} covered twice")
            covered[v] = idx
    target = set(range(T.num_vertices)) - removed
    if set(covered) != target:
        violations.append(f"matching covers {len(covered)} of {len(target)} vertices")
    return violations


def matching_after_removal(T: Template, Zprime: Sequence[int]) -> Optional[List[Tuple[int, ...]]]:
    """Perfect matching of T[V \\ Z'] or None"""
    removed = {int(z) for z in Zprime}
    if len(removed) != T.m or len(removed) != len(Zprime):
        raise HypergraphError(f"|Z'| must be {T.m}, got {len(Zprime)}")
    if not removed <= set(T.flexible):
        raise HypergraphError("Z' must lie inside the flexible set")

    pairs = _base_pairs(T)
    left = [v for v in T.part(0) if v not in removed]
    left_index = {v: i for i, v in enumerate(left)}
    bip_edges = [(left_index[int(a)], int(b)) for a, b in pairs if int(a) in left_index]
    matched = maximum_matching(len(left), 3 * T.m, bip_edges)
    if len(matched) < 3 * T.m:
        return None

    row_of = {(int(a), int(b)): i for i, (a, b) in enumerate(pairs)}
    lifted = [tuple(int(v) for v in T.edges[row_of[(left[u], b)]]) for u, b in matched]
    violations = _matching_violations(T, lifted, removed)
    if violations:
        logger.error(f"❌ Lifted template matching failed its own check: {violations[:3]}")
        raise CertificateError("template matching failed verification", violations)
    return lifted


def verify_flexibility(T: Template, mode: Optional[str] = None, trials: int = 200, seed: int = 0,
                       budget: Optional[int] = None, progress: bool = False) -> FlexibilityReport:
    """Check that removing any m flexible vertices leaves a perfect matching.

    mode=None picks exhaustive whenever C(2m, m) fits the budget.
    """
    budget = budget if budget is not None else config.flex_budget
    total = math.comb(len(T.flexible), T.m)
    if mode is None:
        mode = "exhaustive" if total <= budget else "sampled"
    if mode == "exhaustive":
        if total > budget:
            raise BudgetExceededError(f"C({len(T.flexible)},{T.m}) = {total} removals exceed budget",
                                      budget=budget, explored=0)
        candidates = combinations(T.flexible, T.m)
        tested_total = total
    elif mode == "sampled":
        rng = rng_for(seed)
        flex = np.asarray(T.flexible)
        candidates = (tuple(int(z) for z in np.sort(rng.choice(flex, size=T.m, replace=False)))
                      for _ in range(trials))
        tested_total = trials
    else:
        raise ValueError(f"Unknown verification mode '{mode}'")

    if progress:
        candidates = tqdm(candidates, total=tested_total, desc="flexibility", leave=False)
    tested = 0
    for Zprime in candidates:
        tested += 1
        if matching_after_removal(T, Zprime) is None:
            logger.info(f"🔍 Template not flexible: removing {list(Zprime)} leaves no perfect matching")
            return FlexibilityReport(mode=mode, tested=tested, verdict="fail", witness=list(Zprime))
    note = "" if mode == "exhaustive" else f"no counterexample in {tested} trials"
    return FlexibilityReport(mode=mode, tested=tested, verdict="pass", note=note)


# ---------------------------------------------------------------- construction


def _matching_round(rng: np.random.Generator, m: int, pairs: set, deg0: np.ndarray,
                    deg1: np.ndarray, degree_cap: int) -> int:
    """Match the 3m least loaded Y_0 vertices to a random permutation of Y_1"""
    order = np.lexsort((rng.random(4 * m), deg0))[:3 * m]
    targets = rng.permutation(3 * m)
    added = 0
    for a, b in zip(order.tolist(), targets.tolist()):
        if (a, b) in pairs or deg0[a] >= degree_cap or deg1[b] >= degree_cap:
            continue
        pairs.add((a, b))
        deg0[a] += 1
        deg1[b] += 1
        added += 1
    return added


def _to_template(m: int, pairs: set) -> Template:
    edges = sorted((a, 4 * m + b) for a, b in pairs)
    return Template(2, m, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def build_template(r: int, m: int, seed: int = 0, degree_cap: int = DEFAULT_DEGREE_CAP,
                   retries: int = 25, rounds: Optional[int] = None,
                   flex_budget: Optional[int] = None, trials: int = 200) -> Template:
    """Randomized (r, m)-template with verified flexibility and max degree <= degree_cap"""
    if r < 2 or m < 1:
        raise HypergraphError("templates need r >= 2 and m >= 1")
    if degree_cap < 1:
        raise HypergraphError("degree cap must be positive")
    start = rounds if rounds is not None else DEFAULT_START_ROUNDS
    streams = np.random.SeedSequence(int(seed)).spawn(retries)
    attempts: List[Dict[str, Any]] = []

    for attempt, stream in enumerate(streams, start=1):
        rng = np.random.default_rng(stream)
        pairs: set = set()
        deg0 = np.zeros(4 * m, dtype=np.int64)
        deg1 = np.zeros(3 * m, dtype=np.int64)
        done = 0
        report = None
        while True:
            target = start if done == 0 else done + 1
            stalled = False
            while done < target:
                if _matching_round(rng, m, pairs, deg0, deg1, degree_cap) == 0:
                    stalled = True
                    break
                done += 1
            T2 = _to_template(m, pairs)
            report = verify_flexibility(T2, trials=trials, seed=int(rng.integers(2 ** 32)),
                                        budget=flex_budget)
            if report.verdict == "pass":
                T = extend_template(T2, r)
                T.stats = {"attempt": attempt, "rounds": done, "edges": T.num_edges,
                           "max_degree": T.max_degree, "verification": report.mode}
                logger.info(f"✅ Built ({r},{m})-template: {T.num_edges} edges, "
                            f"max degree {T.max_degree}, {done} rounds, attempt {attempt}")
                return T
            if stalled or int(max(deg0.max(), deg1.max())) >= degree_cap:
                break
        attempts.append({"attempt": attempt, "rounds": done, "edges": len(pairs),
                         "max_degree": int(max(deg0.max(), deg1.max())),
                         "witness": report.witness if report else None})
        logger.warning(f"⚠️ Template attempt {attempt} not flexible after {done} rounds, retrying")

    logger.error(f"❌ Template construction failed after {retries} attempts (m={m}, cap={degree_cap})")
    raise TemplateConstructionError(
        f"no flexible ({r},{m})-template within degree cap {degree_cap} after {retries} attempts",
        attempts)


def extend_template(T2: Template, r_target: int) -> Template:
    """Lift a 2-template to uniformity r by appending clones of the Y_1 coordinate"""
    if r_target < 2:
        raise HypergraphError("target uniformity must be at least 2")
    if T2.r != 2:
        raise HypergraphError("only 2-uniform templates can be extended")
    if r_target == 2:
        return Template(2, T2.m, T2.edges.copy(), T2.flexible, dict(T2.stats))
    cols = [T2.edges[:, 0], T2.edges[:, 1]]
    cols.extend(T2.edges[:, 1] + 3 * T2.m * (i - 1) for i in range(2, r_target))
    return Template(r_target, T2.m, np.stack(cols, axis=1), T2.flexible, dict(T2.stats))


# ----------------------------------------------------------- serialization


def template_to_json(T: Template) -> Dict[str, Any]:
    return {
        "r": T.r,
        "m": T.m,
        "parts": [[p.start, p.stop] for p in T.parts],
        "flexible": list(T.flexible),
        "edges": [list(e) for e in T.edge_list()],
        "max_degree": T.max_degree,
        "stats": T.stats,
    }


def template_from_json(data: Dict[str, Any]) -> Template:
    T = Template(int(data["r"]), int(data["m"]), np.asarray(data["edges"], dtype=np.int64),
                 tuple(int(z) for z in data.get("flexible", ())), dict(data.get("stats", {})))
    violations = structure_violations(T)
    if violations:
        raise HypergraphError(f"invalid template: {violations[0]}")
    return T


# ----------------------------------------------------------------- placement


@dataclass
class PlacedTemplate:
    """A template whose abstract vertices are mapped injectively into a host"""
    template: Template
    mapping: np.ndarray

    @property
    def flexible(self) -> List[int]:
        return [int(self.mapping[z]) for z in self.template.flexible]

    @property
    def vertices(self) -> List[int]:
        return self.mapping.tolist()

    def host_edges(self) -> List[Tuple[int, ...]]:
        return [tuple(int(self.mapping[v]) for v in e) for e in self.template.edges]

    def matching_for(self, Zprime_host: Sequence[int]) -> Optional[List[Tuple[int, ...]]]:
        """Host edges of a perfect matching of T[V \\ Z'] for a host-side Z'"""
        back = {int(h): a for a, h in enumerate(self.mapping.tolist())}
        abstract = []
        for z in Zprime_host:
            if int(z) not in back:
                raise HypergraphError(f"vertex {z} is not a template vertex")
            abstract.append(back[int(z)])
        matched = matching_after_removal(self.template, abstract)
        if matched is None:
            return None
        return [tuple(int(self.mapping[v]) for v in e) for e in matched]


def place_template(T: Template, parts: Sequence[Sequence[int]]) -> PlacedTemplate:
    """Map part Y_i of T onto the host vertices parts[i] (Z goes to the first 2m of parts[0])"""
    if len(parts) != T.r:
        raise HypergraphError(f"expected {T.r} host parts, got {len(parts)}")
    mapping = np.empty(T.num_vertices, dtype=np.int64)
    for i, host in enumerate(parts):
        part = T.part(i)
        if len(host) != len(part):
            raise HypergraphError(f"host part {i} has {len(host)} vertices, expected {len(part)}")
        mapping[part.start:part.stop] = np.asarray(list(host), dtype=np.int64)
    if np.unique(mapping).size != mapping.size:
        raise HypergraphError("host parts overlap")
    return PlacedTemplate(T, mapping)
