#!/usr/bin/env python3
"""
Spanning structure drivers: perfect matchings, F-factors and loose Hamilton cycles, each self-verified
"""

import time
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from src.core.errors import CertificateError, DivisibilityError, HypergraphError
from src.core.hypergraph import Hypergraph, content_digest, edge_density, is_linear
from src.core.models import PipelineConfig, SpanningCertificate
from src.pipeline.claims import (CLOSING_RESERVE_EDGES, AbsorbingStructure, build_absorbing_structure,
                                 close_path, complete_cover, extract_flexible_cover, greedy_loose_path,
                                 greedy_tiling, rewind_path)
from src.structures.absorbers import degeneracy_bound, find_piece_order
from src.structures.generators import rng_for
from src.structures.paths import check_loose_cycle, check_loose_path, path_vertices

logger = logging.getLogger(__name__)

# Pieces of larger motifs must be listed in F-vertex order
MAX_PERMUTED_ORDER = 8


def single_edge(k: int) -> Hypergraph:
    return Hypergraph(k, k, [list(range(k))])


def _motif_from_certificate(cert: SpanningCertificate) -> Optional[Hypergraph]:
    if cert.kind == "matching":
        return single_edge(cert.k)
    if cert.motif is None or cert.motif_vertices is None:
        return None
    return Hypergraph(cert.k, cert.motif_vertices, cert.motif)


def piece_violations(H: Hypergraph, F: Hypergraph, pieces: Sequence[Sequence[int]],
                     target: Set[int]) -> List[str]:
    """Pieces are disjoint copies of F in H whose union is exactly `target`"""
    violations: List[str] = []
    seen: Dict[int, int] = {}
    for i, piece in enumerate(pieces):
        piece = tuple(int(v) for v in piece)
        if len(piece) != F.n:
            violations.append(f"piece {i} has {len(piece)} vertices, F has {F.n}")
            continue
        if any(not 0 <= v < H.n for v in piece):
            violations.append(f"piece {i} leaves the vertex range")
            continue
        for v in piece:
            if v in seen:
                violations.append(f"vertex {v} lies in pieces {seen[v]} and {i}")
            else:
                seen[v] = i
        direct = all(H.has_edge(piece[x] for x in e) for e in F.edge_list())
        if not direct and (F.n > MAX_PERMUTED_ORDER or find_piece_order(H, F, piece) is None):
            violations.append(f"piece {i} {list(piece)} is not a copy of F")
    covered = set(seen)
    if covered != target:
        missing, extra = len(target - covered), len(covered - target)
        violations.append(f"pieces miss {missing} vertices and cover {extra} outside the target")
    return violations


def path_piece_violations(H: Hypergraph, edges: Sequence[Sequence[int]]) -> List[str]:
    return [f"edge {i} {list(e)} is not an edge of H" for i, e in enumerate(edges)
            if len(e) != H.k or not H.has_edge(e)]


def verify_certificate(H: Hypergraph, cert: SpanningCertificate,
                       F: Optional[Hypergraph] = None) -> Tuple[bool, List[str]]:
    """Exact check of a matching, F-factor or loose Hamilton cycle against H"""
    violations: List[str] = []
    if cert.k != H.k or cert.n != H.n:
        return False, [f"certificate is for a {cert.k}-graph on {cert.n} vertices, host is {H}"]
    everything = set(range(H.n))

    if cert.kind == "ham_cycle":
        k = H.k
        if k < 2 or H.n % (k - 1):
            return False, [f"n = {H.n} is not divisible by k - 1"]
        expected = H.n // (k - 1)
        if len(cert.pieces) != expected:
            violations.append(f"cycle has {len(cert.pieces)} edges, expected {expected}")
        violations.extend(path_piece_violations(H, cert.pieces))
        violations.extend(check_loose_cycle(cert.pieces))
        covered = path_vertices(cert.pieces)
        if covered != everything:
            violations.append(f"cycle covers {len(covered)} of {H.n} vertices")
        return len(violations) == 0, violations

    F = F or _motif_from_certificate(cert)
    if F is None:
        return False, ["factor certificate without a motif"]
    if F.k != H.k:
        return False, [f"motif uniformity {F.k} differs from host uniformity {H.k}"]
    violations.extend(piece_violations(H, F, cert.pieces, everything))
    return len(violations) == 0, violations


def flexible_cover_violations(H: Hypergraph, struct: AbsorbingStructure, Zprime: Sequence[int],
                              pieces: Sequence[Sequence[int]]) -> List[str]:
    """Check an extracted cover of H[(A u U) minus Z']"""
    target = struct.vertices - {int(z) for z in Zprime}
    if struct.mode == "factor":
        return piece_violations(H, struct.F, pieces, target)
    violations = path_piece_violations(H, pieces)
    violations.extend(check_loose_path(pieces, struct.ends))
    covered = path_vertices(pieces)
    if covered != target:
        violations.append(f"path covers {len(covered)} vertices, expected {len(target)}")
    return violations


def flexibility_spot_check(H: Hypergraph, struct: AbsorbingStructure, samples: int = 5,
                           seed: int = 0) -> List[Tuple[List[int], List[str]]]:
    """Re-extract the cover of H[(A u U) minus Z'] for random Z' of size m and verify each"""
    rng = rng_for(seed)
    Z = np.asarray(struct.Z, dtype=np.int64)
    results = []
    for _ in range(samples):
        Zprime = sorted(rng.choice(Z, size=struct.m, replace=False).tolist())
        pieces, _ = extract_flexible_cover(H, struct, Zprime)
        results.append((Zprime, flexible_cover_violations(H, struct, Zprime, pieces)))
    failed = sum(1 for _, v in results if v)
    if failed:
        logger.warning(f"⚠️ Flexibility spot check: {failed} of {samples} removals failed")
    else:
        logger.info(f"✅ Flexibility spot check passed for {samples} removals")
    return results


def _certify(H: Hypergraph, cert: SpanningCertificate, F: Optional[Hypergraph]) -> SpanningCertificate:
    ok, violations = verify_certificate(H, cert, F)
    cert.verified, cert.violations = ok, violations
    if not ok:
        logger.error(f"❌ Certificate failed verification: {violations[:3]}")
        raise CertificateError(f"{cert.kind} certificate failed verification", violations)
    logger.info(f"✅ Verified {cert.kind} certificate with {len(cert.pieces)} pieces")
    return cert


def find_f_factor(H: Hypergraph, F: Hypergraph, cfg: Optional[PipelineConfig] = None,
                  kind: str = "factor") -> SpanningCertificate:
    """F-factor via greedy tiling or the absorption pipeline"""
    cfg = cfg or PipelineConfig()
    if F.k != H.k:
        raise HypergraphError(f"motif uniformity {F.k} differs from host uniformity {H.k}")
    if not is_linear(F):
        raise HypergraphError("F must be linear")
    if H.n % F.n:
        raise DivisibilityError(f"n = {H.n} is not divisible by v(F) = {F.n}")

    ell = degeneracy_bound(F)
    p = cfg.p if cfg.p is not None else edge_density(H)
    cert = SpanningCertificate(kind=kind, k=H.k, n=H.n, pieces=[], motif=[list(e) for e in F.edge_list()],
                               motif_vertices=F.n, ell=ell, alpha_threshold=cfg.eps * p ** ell,
                               config=cfg.model_dump(), hypergraph_hash=content_digest(H))
    logger.info(f"🔄 Looking for a {kind} in {H} (v(F) = {F.n}, ell = {ell})")

    if H.n == 0:
        return _certify(H, cert, F)

    if cfg.greedy_first:
        start = time.perf_counter()
        tiles, leftover = greedy_tiling(H, F, np.ones(H.n, dtype=bool), cfg)
        cert.phase_seconds["greedy"] = time.perf_counter() - start
        if not leftover:
            cert.pieces = [list(t) for t in tiles]
            cert.provenance = ["greedy"] * len(tiles)
            cert.route = "greedy"
            return _certify(H, cert, F)
        logger.info(f"🔍 Greedy tiling left {len(leftover)} vertices, running the absorption pipeline")

    struct = build_absorbing_structure(H, "factor", F, cfg)
    completion = complete_cover(H, None, struct, cfg)
    inner, labels = extract_flexible_cover(H, struct, completion.Zprime)
    cert.pieces = [list(p) for p in inner + completion.pieces]
    cert.provenance = labels + completion.labels
    cert.route = completion.route
    cert.z_prime = completion.Zprime
    cert.phase_seconds.update(struct.phase_seconds)
    return _certify(H, cert, F)


def find_perfect_matching(H: Hypergraph, cfg: Optional[PipelineConfig] = None) -> SpanningCertificate:
    return find_f_factor(H, single_edge(H.k), cfg, kind="matching")


def _greedy_cycle(H: Hypergraph, cfg: PipelineConfig) -> Optional[Tuple[List[Tuple[int, ...]], List[str]]]:
    """Greedy loose path from a maximum-degree vertex, closed by a bounded search back to it"""
    k = H.k
    start = int(np.argmax(H.vertex_degrees))
    available = np.ones(H.n, dtype=bool)
    edges, ends = greedy_loose_path(H, start, available, stop_at=CLOSING_RESERVE_EDGES * (k - 1))
    for _ in range(cfg.rewind + 1):
        if len(edges) >= 1:
            L = np.flatnonzero(available).tolist()
            found = close_path(H, ends[-1], start, L, [], 0, cfg.closing_budget)
            if found is not None:
                closing, _ = found
                if len(edges) + len(closing) >= 3:
                    return edges + closing, ["greedy"] * len(edges) + ["greedy:closing"] * len(closing)
        if len(edges) <= 1:
            break
        rewind_path(edges, ends, available)
    return None


def find_loose_hamilton_cycle(H: Hypergraph, cfg: Optional[PipelineConfig] = None) -> SpanningCertificate:
    """Loose Hamilton cycle: path on (A u U) minus Z' from a_1 to a_2, then back through the rest"""
    cfg = cfg or PipelineConfig()
    k = H.k
    if k < 3:
        raise HypergraphError("loose Hamilton cycles are built for k >= 3")
    if H.n % (k - 1):
        raise DivisibilityError(f"n = {H.n} is not divisible by k - 1 = {k - 1}")
    if H.n // (k - 1) < 3:
        raise DivisibilityError(f"n = {H.n} is too small for a loose cycle")

    cert = SpanningCertificate(kind="ham_cycle", k=k, n=H.n, pieces=[], config=cfg.model_dump(),
                               hypergraph_hash=content_digest(H))
    logger.info(f"🔄 Looking for a loose Hamilton cycle in {H}")

    if cfg.greedy_first:
        start = time.perf_counter()
        found = _greedy_cycle(H, cfg)
        cert.phase_seconds["greedy"] = time.perf_counter() - start
        if found is not None:
            edges, labels = found
            cert.pieces = [list(e) for e in edges]
            cert.provenance = labels
            cert.route = "greedy"
            return _certify(H, cert, None)
        logger.info("🔍 Greedy path could not be closed, running the absorption pipeline")

    struct = build_absorbing_structure(H, "ham", None, cfg)
    completion = complete_cover(H, None, struct, cfg)
    inner, labels = extract_flexible_cover(H, struct, completion.Zprime)
    cert.pieces = [list(e) for e in inner + completion.pieces]
    cert.provenance = labels + completion.labels
    cert.route = completion.route
    cert.z_prime = completion.Zprime
    cert.phase_seconds.update(struct.phase_seconds)
    return _certify(H, cert, None)


def divisible(task: str, n: int, k: int, f: Optional[int] = None) -> bool:
    """Divisibility pre-screen of an experiment grid point"""
    if task == "hamcycle":
        return k >= 3 and n % (k - 1) == 0 and n // (k - 1) >= 3
    if task == "matching":
        return n % k == 0
    if task == "factor":
        return f is not None and n % f == 0
    return True

