#!/usr/bin/env python3
"""
Pseudo-randomness and jumbledness audits, parameter conversions and the density floor
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import config
from src.core.errors import BudgetExceededError
from src.core.hypergraph import Hypergraph, content_digest, edge_density, labelled_edge_count
from src.core.models import AuditReport, DensityFloorReport, PseudoParams, RestrictedParams
from src.structures.generators import random_streams

logger = logging.getLogger(__name__)

SetTuple = Tuple[np.ndarray, ...]


@dataclass
class _Candidate:
    sets: SetTuple
    descriptor: str
    count: int = 0
    expected: float = 0.0
    error: float = 0.0


# ------------------------------------------------------------ set families


def greedy_sparse_order(H: Hypergraph, start: int, length: int) -> List[int]:
    """Grow a set from `start`, each step adding the vertex completing the fewest edges.

    Ties go to lower degree, then lower index.
    """
    length = min(length, H.n)
    k = H.k
    in_s = np.zeros(H.n, dtype=bool)
    members = np.zeros(H.num_edges, dtype=np.int64)
    gain = np.zeros(H.n, dtype=np.int64)
    order: List[int] = []
    v = int(start)
    while True:
        order.append(v)
        in_s[v] = True
        inc = H.incident_edges(v)
        members[inc] += 1
        ready = inc[members[inc] == k - 1]
        if ready.size:
            rows = H.edges[ready]
            missing = rows[~in_s[rows]]
            np.add.at(gain, missing, 1)
        if len(order) >= length:
            return order
        outside = np.flatnonzero(~in_s)
        pick = np.lexsort((outside, H.vertex_degrees[outside], gain[outside]))[0]
        v = int(outside[pick])


def greedy_independent_set(H: Hypergraph) -> List[int]:
    """Maximal independent set, scanning vertices by ascending degree"""
    k = H.k
    in_s = np.zeros(H.n, dtype=bool)
    members = np.zeros(H.num_edges, dtype=np.int64)
    blocked = np.zeros(H.n, dtype=bool)
    chosen = []
    for v in np.lexsort((np.arange(H.n), H.vertex_degrees)).tolist():
        if blocked[v]:
            continue
        chosen.append(v)
        in_s[v] = True
        inc = H.incident_edges(v)
        members[inc] += 1
        ready = inc[members[inc] == k - 1]
        if ready.size:
            rows = H.edges[ready]
            blocked[rows[~in_s[rows]]] = True
    return sorted(chosen)


def _link_vertices(H: Hypergraph, v: int) -> np.ndarray:
    rows = H.edges[H.incident_edges(v)]
    return np.setdiff1d(np.unique(rows), [v])


def _min_size(n: int, k: int, alpha: float) -> int:
    return min(n, max(1, math.ceil((alpha ** (1.0 / k)) * n - 1e-9)))


def _trial_candidates(H: Hypergraph, alpha: float, trial: int,
                      rng: np.random.Generator) -> List[_Candidate]:
    """Set tuples of one sampled trial (distribution v1).

    trial % 3 == 0: independent uniform subsets with sizes uniform in [s_min, n]
    trial % 3 == 1: greedy sparse prefix from a random start, used in every coordinate,
                    plus the lowest-degree s_min vertices
    trial % 3 == 2: link set of a random vertex and its complement, with V filling up
    """
    n, k = H.n, H.k
    s_min = _min_size(n, k, alpha)
    everything = np.arange(n)
    family = trial % 3
    if family == 0:
        sizes = rng.integers(s_min, n + 1, size=k)
        sets = tuple(np.sort(rng.choice(n, size=int(s), replace=False)) for s in sizes)
        return [_Candidate(sets, f"uniform sizes {tuple(int(s) for s in sizes)}")]
    if family == 1:
        start = int(rng.integers(n))
        size = int(rng.integers(s_min, n + 1)) if trial % 2 else s_min
        sparse = np.asarray(sorted(greedy_sparse_order(H, start, size)))
        low = np.sort(np.lexsort((everything, H.vertex_degrees))[:s_min])
        return [_Candidate((sparse,) * k, f"greedy-sparse start={start} size={size}"),
                _Candidate((low,) * k, f"lowest-degree size={s_min}")]
    v = int(rng.integers(n))
    link = _link_vertices(H, v)
    rest = np.setdiff1d(everything, link)
    out = []
    for name, S in (("link", link), ("non-link", rest)):
        if S.size:
            out.append(_Candidate((S,) + (everything,) * (k - 1), f"{name} of {v}, V..."))
            out.append(_Candidate((S,) * k, f"{name} of {v}, all coordinates"))
    return out


# ---------------------------------------------------------------- criteria


def _relative(count: int, expected: float, volume: float = 0.0) -> float:
    if expected <= 0:
        return 0.0 if count == 0 else math.inf
    return abs(count - expected) / expected


def _additive(count: int, expected: float, volume: float) -> float:
    if volume <= 0:
        return 0.0
    return abs(count - expected) / math.sqrt(volume)


def _evaluate(H: Hypergraph, cand: _Candidate, p: float,
              score: Callable[[int, float, float], float]) -> _Candidate:
    volume = float(np.prod([s.size for s in cand.sets], dtype=np.float64))
    cand.count = labelled_edge_count(H, *cand.sets)
    cand.expected = p * volume
    cand.error = score(cand.count, cand.expected, volume)
    return cand


def _labelled_tensor(H: Hypergraph) -> np.ndarray:
    tensor = np.zeros((H.n,) * H.k, dtype=np.float64)
    for e in H.edge_list():
        for perm in permutations(e):
            tensor[perm] = 1.0
    return tensor


def _exhaustive_worst(H: Hypergraph, p: float, threshold_volume: float,
                      score: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
                      ) -> Tuple[int, Optional[_Candidate]]:
    """Scan every k-tuple of subsets with volume >= threshold; vectorised over the last coordinate"""
    n, k = H.n, H.k
    total = (2 ** n) ** k
    if total > config.exhaustive_budget:
        raise BudgetExceededError(f"{total} subset tuples exceed exhaustive budget",
                                  budget=config.exhaustive_budget, explored=0)
    masks = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(np.float64)
    sizes = masks.sum(axis=1)
    tensor = _labelled_tensor(H)
    worst: Optional[_Candidate] = None
    tested = 0
    for prefix in product(range(2 ** n), repeat=k - 1):
        w = tensor
        volume = 1.0
        for a in prefix:
            w = np.tensordot(masks[a], w, axes=(0, 0))
            volume *= sizes[a]
        volumes = volume * sizes
        ok = (volumes >= threshold_volume) & (volumes > 0)
        if not ok.any():
            continue
        counts = masks @ w
        errors = np.where(ok, score(counts, p * volumes, volumes), -1.0)
        tested += int(ok.sum())
        last = int(np.argmax(errors))
        if worst is None or errors[last] > worst.error:
            chosen = [a for a in prefix] + [last]
            sets = tuple(np.flatnonzero(masks[a]) for a in chosen)
            worst = _Candidate(sets, f"subset masks {chosen}", int(round(counts[last])),
                               float(p * volumes[last]), float(errors[last]))
    return tested, worst


def _relative_vec(counts, expected, volumes):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(expected > 0, np.abs(counts - expected) / np.where(expected > 0, expected, 1.0),
                        np.where(counts > 0, np.inf, 0.0))


def _additive_vec(counts, expected, volumes):
    return np.abs(counts - expected) / np.sqrt(np.maximum(volumes, 1.0))


def _sampled_worst(H: Hypergraph, p: float, alpha: float, trials: int, seed: int,
                   score: Callable[[int, float, float], float],
                   workers: Optional[int] = None) -> Tuple[int, Optional[_Candidate]]:
    """Evaluate trial tuples in parallel; the reduction keeps the first maximum in trial order"""
    threshold = alpha * float(H.n) ** H.k
    streams = random_streams(seed, trials)
    everything = np.arange(H.n)

    def run(trial: int) -> List[_Candidate]:
        cands = _trial_candidates(H, alpha, trial, streams[trial])
        if trial == 0:
            cands.insert(0, _Candidate((everything,) * H.k, "all of V"))
        kept = []
        for cand in cands:
            volume = float(np.prod([s.size for s in cand.sets], dtype=np.float64))
            if volume >= threshold and volume > 0:
                kept.append(_evaluate(H, cand, p, score))
        return kept

    workers = workers or config.threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]

    worst = None
    tested = 0
    for batch in results:
        for cand in batch:
            tested += 1
            if worst is None or cand.error > worst.error:
                worst = cand
    return tested, worst


def _report(H: Hypergraph, criterion: str, mode: str, trials: int, tested: int,
            worst: Optional[_Candidate], limit: float, params: dict) -> AuditReport:
    if worst is None:
        verdict, note = "inconclusive", "no set tuple reached the volume threshold"
    elif worst.error > limit:
        verdict, note = "fail", f"violation with error {worst.error:.4g} > {limit:.4g}"
    else:
        verdict = "pass"
        note = (f"no violation found in {trials} trials ({tested} set tuples)" if mode == "sampled"
                else f"all {tested} qualifying set tuples checked")
    report = AuditReport(
        criterion=criterion, mode=mode, trials=trials, verdict=verdict,
        worst_sets=[s.tolist() for s in worst.sets] if worst else [],
        worst_descriptors=[worst.descriptor] if worst else [],
        worst_count=worst.count if worst else None,
        worst_expected=worst.expected if worst else None,
        worst_error=float(worst.error) if worst else 0.0,
        hypergraph_hash=content_digest(H), params=params, note=note)
    marker = "✅" if verdict == "pass" else ("❌" if verdict == "fail" else "⚠️")
    logger.info(f"{marker} {criterion} audit ({mode}): {verdict}, worst error {report.worst_error:.4g}")
    return report


def audit_pseudo_random(H: Hypergraph, params: PseudoParams, mode: str = "sampled",
                        trials: int = 200, seed: int = 0, workers: Optional[int] = None) -> AuditReport:
    """e(A_1..A_k) = (1 +- eps) p prod|A_i| for every tuple with prod|A_i| >= alpha n^k"""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    logger.info(f"🔍 Pseudo-randomness audit of {H} ({mode}, p={params.p}, alpha={params.alpha}, eps={params.eps})")
    threshold = params.alpha * float(H.n) ** H.k
    if mode == "exhaustive":
        tested, worst = _exhaustive_worst(H, params.p, threshold, _relative_vec)
        trials = tested
    elif mode == "sampled":
        tested, worst = _sampled_worst(H, params.p, params.alpha, trials, seed, _relative, workers)
    else:
        raise ValueError(f"Unknown audit mode '{mode}'")
    return _report(H, "pseudo_random", mode, trials, tested, worst, params.eps, params.model_dump())


def audit_jumbled(H: Hypergraph, p: float, beta: float, mode: str = "sampled", trials: int = 200,
                  seed: int = 0, workers: Optional[int] = None) -> AuditReport:
    """e(A_1..A_k) = p prod|A_i| +- beta sqrt(prod|A_i|) for every tuple"""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if p < 0 or beta < 0:
        raise ValueError("p and beta must be non-negative")
    logger.info(f"🔍 Jumbledness audit of {H} ({mode}, p={p}, beta={beta})")
    if mode == "exhaustive":
        tested, worst = _exhaustive_worst(H, p, 0.0, _additive_vec)
        trials = tested
    elif mode == "sampled":
        tested, worst = _sampled_worst(H, p, 0.0, trials, seed, _additive, workers)
    else:
        raise ValueError(f"Unknown audit mode '{mode}'")
    return _report(H, "jumbled", mode, trials, tested, worst, beta, {"p": p, "beta": beta})


def recheck_violation(H: Hypergraph, report: AuditReport) -> bool:
    """Re-evaluate the worst tuple of a report; True iff it reproduces the recorded violation"""
    if report.verdict != "fail" or not report.worst_sets:
        return False
    sets = [np.asarray(s, dtype=np.int64) for s in report.worst_sets]
    count = labelled_edge_count(H, *sets)
    volume = float(np.prod([s.size for s in sets], dtype=np.float64))
    p = report.params["p"]
    if report.criterion == "pseudo_random":
        error = _relative(count, p * volume)
        limit = report.params["eps"]
    else:
        error = _additive(count, p * volume, volume)
        limit = report.params["beta"]
    return count == report.worst_count and error > limit


def small_set_deviation_ok(H: Hypergraph, sets: Sequence[Sequence[int]], params: PseudoParams) -> bool:
    """Small tuples (volume < alpha n^k) deviate by at most (1 + eps) p alpha n^k"""
    volume = float(np.prod([len(s) for s in sets], dtype=np.float64))
    scale = params.alpha * float(H.n) ** H.k
    if volume >= scale:
        return True
    count = labelled_edge_count(H, *sets)
    return abs(count - params.p * volume) <= (1 + params.eps) * params.p * scale


# -------------------------------------------------------------- conversions


def jumbled_to_pseudo(p: float, beta: float, eps: float, n: int, k: int) -> float:
    """alpha = beta^2 / (eps^2 p^2 n^k)"""
    if p <= 0 or eps <= 0 or n <= 0 or k <= 0:
        raise ZeroDivisionError("p, eps, n and k must be positive")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return beta ** 2 / (eps ** 2 * p ** 2 * float(n) ** k)


def spectral_to_jumbled(n: int, d: float, lam: float) -> Tuple[float, float]:
    """For graphs: an (n, d, lambda)-graph is (d/n, lambda)-jumbled"""
    if n <= 0:
        raise ValueError("n must be positive")
    return d / n, lam


def restrict_params(params: PseudoParams, gamma: float) -> RestrictedParams:
    """Parameters inherited by H[U] when |U| >= gamma^(1/k) n"""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    alpha = params.alpha / gamma
    vacuous = alpha > 1
    if vacuous:
        logger.warning(f"⚠️ Restricted alpha {alpha:.4g} > 1: the condition is vacuous")
    return RestrictedParams(p=params.p, alpha=alpha, eps=params.eps, vacuous=vacuous)


# ------------------------------------------------------------- density floor


def density_floor_check(H: Hypergraph, eps: float, ell: int) -> DensityFloorReport:
    """Refute (p, eps p^ell, eps')-pseudo-randomness with a large independent set"""
    n, k = H.n, H.k
    density = edge_density(H)
    independent = greedy_independent_set(H)
    threshold = eps * density ** ell * float(n) ** k
    refuted = len(independent) ** k >= threshold and labelled_edge_count(H, *([independent] * k)) == 0
    s = k * (k - 1) / (ell * (k - 1) + k)
    logger.info(f"🔍 Density floor: |I| = {len(independent)}, threshold {threshold:.4g}, refuted={refuted}")
    return DensityFloorReport(independent_set_size=len(independent), independent_set=independent,
                              threshold=threshold, density=density, refuted=refuted,
                              s_exponent=s, ell=ell)
