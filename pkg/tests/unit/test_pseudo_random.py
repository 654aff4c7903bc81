"""
Unit tests for pseudo-randomness audits, conversions and the density floor
"""

import networkx as nx
import pytest

from src.audit.pseudo_random import (audit_jumbled, audit_pseudo_random, density_floor_check,
                                     greedy_independent_set, greedy_sparse_order, jumbled_to_pseudo,
                                     recheck_violation, restrict_params, small_set_deviation_ok,
                                     spectral_to_jumbled)
from src.core.errors import BudgetExceededError
from src.core.hypergraph import Hypergraph, labelled_edge_count
from src.core.models import PseudoParams
from src.structures.generators import plant_hole


class TestPseudoRandomAudit:
    """Sampled and exhaustive (p, alpha, eps) audits"""

    def test_complete_graph_passes(self, complete):
        report = audit_pseudo_random(complete(3, 30), PseudoParams(p=1.0, alpha=0.5, eps=0.5),
                                     trials=30, seed=1, workers=1)
        assert report.verdict == "pass"
        assert report.worst_error < 0.5
        assert "30 trials" in report.note

    def test_empty_graph_fails_and_rechecks(self):
        H = Hypergraph.empty(3, 12)
        report = audit_pseudo_random(H, PseudoParams(p=0.5, alpha=0.5, eps=0.5), trials=10, workers=1)
        assert report.verdict == "fail"
        assert report.worst_count == 0
        assert report.worst_error == pytest.approx(1.0)
        assert recheck_violation(H, report)

    def test_recheck_ignores_passing_reports(self, complete):
        H = complete(3, 30)
        report = audit_pseudo_random(H, PseudoParams(p=1.0, alpha=0.5, eps=0.5), trials=3, workers=1)
        assert not recheck_violation(H, report)

    def test_same_seed_same_report(self, random_graph):
        H = random_graph(3, 20, 0.3, 2)
        params = PseudoParams(p=0.3, alpha=0.3, eps=0.5)
        first = audit_pseudo_random(H, params, trials=15, seed=9, workers=1)
        second = audit_pseudo_random(H, params, trials=15, seed=9, workers=2)
        assert first.worst_sets == second.worst_sets
        assert first.worst_error == second.worst_error

    def test_planted_hole_is_found_with_witness(self, random_graph):
        hole = set(range(12))
        H = random_graph(3, 24, 0.5, 4)
        planted = plant_hole(H, sorted(hole))
        params = PseudoParams(p=0.5, alpha=0.125, eps=0.5)
        report = audit_pseudo_random(planted, params, trials=60, seed=0, workers=1)
        assert report.verdict == "fail"
        assert report.worst_error >= 0.9
        assert recheck_violation(planted, report)
        assert all(len(S) >= 12 for S in report.worst_sets)
        assert len(set(report.worst_sets[0]) & hole) >= 9
        control = audit_pseudo_random(H, params, trials=60, seed=0, workers=1)
        assert control.worst_error < report.worst_error

    def test_exhaustive_triangle(self, complete):
        K3 = complete(2, 3)
        report = audit_pseudo_random(K3, PseudoParams(p=1.0, alpha=1.0, eps=0.5), mode="exhaustive")
        assert report.verdict == "pass"
        assert report.trials == 1
        assert report.worst_count == 6

    def test_exhaustive_finds_singleton_violation(self, complete):
        report = audit_pseudo_random(complete(2, 3), PseudoParams(p=1.0, alpha=0.1, eps=0.5),
                                     mode="exhaustive")
        assert report.verdict == "fail"
        assert report.worst_error == pytest.approx(1.0)

    def test_exhaustive_budget(self, complete):
        with pytest.raises(BudgetExceededError):
            audit_pseudo_random(complete(3, 30), PseudoParams(p=1.0, alpha=0.5, eps=0.5), mode="exhaustive")

    def test_bad_arguments(self, complete):
        params = PseudoParams(p=1.0, alpha=0.5, eps=0.5)
        with pytest.raises(ValueError, match="Unknown audit mode"):
            audit_pseudo_random(complete(3, 6), params, mode="full")
        with pytest.raises(ValueError, match="trials"):
            audit_pseudo_random(complete(3, 6), params, trials=0)

    def test_report_provenance(self, complete):
        report = audit_pseudo_random(complete(3, 8), PseudoParams(p=1.0, alpha=0.5, eps=0.5),
                                     trials=2, workers=1)
        assert report.distribution_version == "v1"
        assert len(report.hypergraph_hash) == 64
        assert report.params == {"p": 1.0, "alpha": 0.5, "eps": 0.5}


class TestJumbledAudit:

    def test_complete_graph_is_jumbled(self, complete):
        # |A||B| - e(A, B) = |A & B| <= sqrt(|A||B|)
        report = audit_jumbled(complete(2, 20), 1.0, 1.5, trials=30, workers=1)
        assert report.verdict == "pass"
        assert report.worst_error <= 1.0 + 1e-9

    def test_exhaustive_small_graph(self, complete):
        report = audit_jumbled(complete(2, 4), 1.0, 1.0, mode="exhaustive")
        assert report.verdict == "pass"
        assert report.trials == 15 * 15

    @pytest.mark.parametrize("p,beta", [(0.5, 1.1), (0.3, 0.85)])
    def test_exhaustive_matches_enumeration_on_all_small_graphs(self, p, beta):
        # every graph on at most 6 vertices, up to isomorphism
        for G in nx.graph_atlas_g():
            n = G.number_of_nodes()
            if n == 0 or n > 6:
                continue
            H = Hypergraph(2, n, list(G.edges()))
            nbr = [sum(1 << u for u in G.neighbors(v)) for v in range(n)]
            expected_worst = 0.0
            for a in range(1, 2 ** n):
                A = [v for v in range(n) if a >> v & 1]
                for b in range(1, 2 ** n):
                    count = sum(bin(nbr[v] & b).count("1") for v in A)
                    volume = len(A) * bin(b).count("1")
                    expected_worst = max(expected_worst, abs(count - p * volume) / volume ** 0.5)
            report = audit_jumbled(H, p, beta, mode="exhaustive")
            assert report.worst_error == pytest.approx(expected_worst, abs=1e-9), G.edges()
            assert report.verdict == ("fail" if expected_worst > beta else "pass")

    def test_negative_beta(self, complete):
        with pytest.raises(ValueError, match="non-negative"):
            audit_jumbled(complete(2, 4), 1.0, -1.0)


class TestConversions:

    def test_jumbled_to_pseudo(self):
        assert jumbled_to_pseudo(0.5, 1.0, 0.5, 10, 2) == pytest.approx(0.16)

    @pytest.mark.parametrize("p,beta,eps,n,k", [(0.5, 1.0, 0.5, 10, 2), (0.3, 2.5, 0.1, 40, 3), (0.9, 0.01, 0.7, 7, 4)])
    def test_jumbled_to_pseudo_balances_both_errors(self, p, beta, eps, n, k):
        # at volume alpha n^k the additive slack beta sqrt(vol) equals eps p vol
        volume = jumbled_to_pseudo(p, beta, eps, n, k) * float(n) ** k
        assert abs(beta * volume ** 0.5 - eps * p * volume) <= 1e-12 * max(1.0, eps * p * volume)

    @pytest.mark.parametrize("p,eps,n,k", [(0.5, 0.1, 30, 3), (0.7, 0.25, 12, 2), (0.3, 0.05, 9, 4)])
    def test_jumbled_to_pseudo_at_the_density_threshold(self, p, eps, n, k):
        beta = eps * p ** (k / 2 + 1) * float(n) ** (k / 2)
        assert jumbled_to_pseudo(p, beta, eps, n, k) == pytest.approx(p ** k, rel=1e-12, abs=0)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 0.5, 10, 2), (0.5, 1.0, 0.0, 10, 2), (0.5, 1.0, 0.5, 0, 2)])
    def test_jumbled_to_pseudo_needs_positive_inputs(self, args):
        with pytest.raises(ZeroDivisionError):
            jumbled_to_pseudo(*args)

    def test_spectral_to_jumbled(self):
        assert spectral_to_jumbled(10, 3.0, 2.0) == (0.3, 2.0)

    def test_restrict_params(self):
        params = PseudoParams(p=0.3, alpha=0.2, eps=0.1)
        restricted = restrict_params(params, 0.5)
        assert restricted.alpha == pytest.approx(0.4)
        assert not restricted.vacuous
        assert restrict_params(params, 0.1).vacuous
        with pytest.raises(ValueError):
            restrict_params(params, 0.0)

    def test_small_set_deviation(self):
        H = Hypergraph.empty(2, 10)
        params = PseudoParams(p=0.5, alpha=0.5, eps=0.1)
        assert small_set_deviation_ok(H, [range(10), range(10)], params)
        assert small_set_deviation_ok(H, [[0, 1], [2, 3]], params)


class TestDensityFloor:

    def test_empty_graph_is_refuted(self):
        report = density_floor_check(Hypergraph.empty(3, 10), 0.1, 2)
        assert report.refuted
        assert report.independent_set_size == 10

    def test_complete_graph_is_not_refuted(self, complete):
        report = density_floor_check(complete(3, 10), 0.1, 2)
        assert report.independent_set_size == 2
        assert report.density == pytest.approx(0.72)
        assert report.threshold == pytest.approx(51.84)
        assert not report.refuted
        assert report.s_exponent == pytest.approx(6 / 7)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_independent_set_is_maximal(self, random_graph, seed):
        H = random_graph(3, 15, 0.2, seed)
        independent = greedy_independent_set(H)
        assert labelled_edge_count(H, independent, independent, independent) == 0
        chosen = set(independent)
        for v in set(range(H.n)) - chosen:
            assert any(set(e) - {v} <= chosen for e in H.edge_list() if v in e)

    def test_greedy_sparse_order(self, complete):
        assert greedy_sparse_order(complete(3, 6), 0, 3) == [0, 1, 2]
        assert len(greedy_sparse_order(complete(3, 6), 4, 50)) == 6
