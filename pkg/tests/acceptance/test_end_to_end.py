"""
End-to-end runs of the full absorption pipeline on dense hosts
"""

from itertools import chain, combinations
from math import comb

import numpy as np
import pytest

from src.core.errors import BudgetExceededError, CertificateError, PhaseFailure
from src.core.hypergraph import Hypergraph, RootedMotif, degree_vector
from src.core.models import GenSpec, PipelineConfig
from src.embedding.embedder import (build_compatible_family, count_rooted_copies, counting_lower_bound,
                                    verify_compatible)
from src.pipeline.claims import build_absorbing_structure
from src.pipeline.drivers import (find_loose_hamilton_cycle, find_perfect_matching, flexibility_spot_check,
                                  verify_certificate)
from src.structures.absorbers import build_factor_absorber
from src.structures.generators import loose_path, random_kgraph, rng_for

pytestmark = pytest.mark.slow

EDGE = Hypergraph(3, 3, [(0, 1, 2)])


def host(n, p, seed):
    return random_kgraph(GenSpec(k=3, n=n, p=p, seed=seed))


def complete_3graph(n):
    flat = np.fromiter(chain.from_iterable(combinations(range(n), 3)), dtype=np.int64, count=3 * comb(n, 3))
    return Hypergraph(3, n, flat.reshape(-1, 3))


class TestHamiltonCycle:

    def test_absorption_route(self):
        H = complete_3graph(330)
        cfg = PipelineConfig(alpha_frac=0.13, delta=3, family_reserve_fraction=0.1, greedy_first=False)
        cert = find_loose_hamilton_cycle(H, cfg)
        assert cert.verified
        assert cert.route == "closing"
        assert len(cert.pieces) == 165
        assert len(cert.z_prime) == 1
        assert verify_certificate(H, cert) == (True, [])
        assert "claim2:absorber-complete" in cert.provenance
        assert "claim3:closing" in cert.provenance


class TestCountingBound:
    """Rooted copy counts against 1/2 (cp)^e(F) |U|^f on H(3, 40, 0.6)"""

    C, P = 0.5, 0.6

    def motifs(self):
        path = loose_path(3, 2)
        return [RootedMotif(EDGE), RootedMotif(EDGE, (0,)), RootedMotif(path.graph, (0,))]

    def test_counts_meet_lower_bound(self):
        checked = 0
        for seed in range(20):
            H = host(40, self.P, seed)
            rng = rng_for(seed)
            y = int(rng.integers(40))
            U = np.sort(rng.choice([v for v in range(40) if v != y], size=20, replace=False))
            if degree_vector(H, U)[y] < self.C * self.P * float(U.size) ** 2:
                continue
            checked += 1
            for M in self.motifs():
                Y = (y,) if M.roots else ()
                count = count_rooted_copies(H, M, Y, U, budget=10 ** 8)
                bound = counting_lower_bound(self.C, self.P, M.num_edges, U.size, M.non_root_count)
                assert count >= bound, (seed, M.roots, M.num_edges, count, bound)
        assert checked >= 15


class TestCompatibleFamily:
    """Factor absorbers of a single edge over a perfect matching on 30 roots in H(3, 300, 0.5)"""

    def test_family_is_complete_and_compatible(self):
        absorber = build_factor_absorber(EDGE)
        T_edges = [(3 * i, 3 * i + 1, 3 * i + 2) for i in range(10)]
        good = 0
        for seed in range(10):
            H = host(300, 0.5, seed)
            family = build_compatible_family(H, absorber.motif, T_edges, np.ones(300, dtype=bool),
                                             PipelineConfig(seed=seed))
            ok, violations = verify_compatible(family, H)
            if not family.failed and ok:
                good += 1
        assert good >= 8


class TestAbsorbingStructure:
    """Structures on H(3, 400, 0.5), each re-extracted for 5 random Z'"""

    @pytest.mark.parametrize("mode", ["factor", "ham"])
    def test_flexible_on_most_seeds(self, mode):
        built = 0
        for seed in range(10):
            H = host(400, 0.5, seed)
            try:
                struct = build_absorbing_structure(H, mode, EDGE if mode == "factor" else None,
                                                   PipelineConfig(seed=seed))
            except (PhaseFailure, BudgetExceededError):
                continue
            built += 1
            if mode == "ham":
                assert struct.ends is not None
            for Zprime, violations in flexibility_spot_check(H, struct, samples=5, seed=seed):
                assert violations == [], (seed, Zprime)
        assert built >= 7


class TestDrivers:
    """Both drivers on H(3, 600, 0.5) with the default configuration"""

    @pytest.mark.parametrize("driver", [find_perfect_matching, find_loose_hamilton_cycle])
    def test_verified_on_most_seeds(self, driver):
        verified = 0
        for seed in range(10):
            H = host(600, 0.5, seed)
            try:
                cert = driver(H, PipelineConfig(seed=seed))
            except (PhaseFailure, CertificateError, BudgetExceededError):
                continue
            assert cert.route != "greedy"
            assert verify_certificate(H, cert) == (True, [])
            verified += 1
        assert verified >= 7

    def test_default_cycle_runs_the_absorption_pipeline(self):
        H = host(150, 0.5, 1)
        cert = find_loose_hamilton_cycle(H)
        assert cert.verified
        assert cert.route != "greedy"
        assert any(label.startswith("claim2:absorber") for label in cert.provenance)
        assert verify_certificate(H, cert) == (True, [])
