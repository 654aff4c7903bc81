"""
Unit tests for certificate verification and the divisibility screen
"""

import pytest

from src.core.hypergraph import Hypergraph
from src.core.models import SpanningCertificate
from src.pipeline.drivers import divisible, piece_violations, single_edge, verify_certificate
from src.structures.generators import loose_cycle, loose_path


def matching_cert(pieces, n=6):
    return SpanningCertificate(kind="matching", k=3, n=n, pieces=pieces)


class TestVerifyMatching:

    @pytest.fixture
    def host(self):
        return Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5), (0, 3, 4)])

    def test_valid(self, host):
        assert verify_certificate(host, matching_cert([[0, 1, 2], [3, 4, 5]])) == (True, [])

    def test_repeated_vertex(self, host):
        ok, violations = verify_certificate(host, matching_cert([[0, 1, 2], [0, 3, 4]]))
        assert not ok
        assert "vertex 0 lies in pieces 0 and 1" in violations

    def test_non_edge(self, host):
        ok, violations = verify_certificate(host, matching_cert([[0, 1, 3], [2, 4, 5]]))
        assert not ok
        assert any("is not a copy of F" in v for v in violations)

    def test_incomplete_cover(self, host):
        ok, violations = verify_certificate(host, matching_cert([[0, 1, 2]]))
        assert not ok
        assert any("miss 3 vertices" in v for v in violations)

    def test_wrong_host(self, host):
        ok, violations = verify_certificate(host, matching_cert([[0, 1, 2]], n=9))
        assert not ok
        assert violations[0].startswith("certificate is for a 3-graph on 9 vertices")


class TestVerifyFactor:

    def test_pieces_in_any_vertex_order(self):
        F = loose_path(3, 2).graph
        H = Hypergraph(3, 5, [(0, 1, 2), (2, 3, 4)])
        assert piece_violations(H, F, [[0, 1, 3, 2, 4]], set(range(5))) == []

    def test_not_a_copy(self):
        F = loose_path(3, 2).graph
        H = Hypergraph(3, 5, [(0, 1, 2), (1, 2, 3)])
        violations = piece_violations(H, F, [[0, 1, 2, 3, 4]], set(range(5)))
        assert violations != []

    def test_motif_from_certificate(self):
        H = Hypergraph(3, 5, [(0, 1, 2), (2, 3, 4)])
        cert = SpanningCertificate(kind="factor", k=3, n=5, pieces=[[0, 1, 2, 3, 4]],
                                   motif=[[0, 1, 2], [2, 3, 4]], motif_vertices=5)
        assert verify_certificate(H, cert) == (True, [])

    def test_missing_motif(self):
        cert = SpanningCertificate(kind="factor", k=3, n=5, pieces=[[0, 1, 2, 3, 4]])
        ok, violations = verify_certificate(Hypergraph.empty(3, 5), cert)
        assert not ok
        assert violations == ["factor certificate without a motif"]

    def test_single_edge(self):
        assert single_edge(4).edge_list() == [(0, 1, 2, 3)]


class TestVerifyCycle:

    def test_valid_cycle(self):
        H = loose_cycle(3, 3)
        cert = SpanningCertificate(kind="ham_cycle", k=3, n=6, pieces=[list(e) for e in H.edge_list()])
        assert verify_certificate(H, cert) == (True, [])

    def test_consecutive_edges_sharing_two(self, complete):
        cert = SpanningCertificate(kind="ham_cycle", k=3, n=6, pieces=[[0, 1, 2], [2, 3, 4], [3, 4, 5]])
        ok, violations = verify_certificate(complete(3, 6), cert)
        assert not ok
        assert "edges 1 and 2 share 2 vertices" in violations

    def test_missing_host_edge(self):
        H = Hypergraph(3, 6, [(0, 1, 2), (2, 3, 4)])
        cert = SpanningCertificate(kind="ham_cycle", k=3, n=6, pieces=[[0, 1, 2], [2, 3, 4], [4, 5, 0]])
        ok, violations = verify_certificate(H, cert)
        assert not ok
        assert "edge 2 [4, 5, 0] is not an edge of H" in violations

    def test_indivisible_order(self, complete):
        cert = SpanningCertificate(kind="ham_cycle", k=3, n=7, pieces=[])
        ok, violations = verify_certificate(complete(3, 7), cert)
        assert not ok
        assert "not divisible" in violations[0]


class TestDivisible:

    @pytest.mark.parametrize("task,n,k,f,expected", [
        ("hamcycle", 10, 3, None, True),
        ("hamcycle", 4, 3, None, False),
        ("hamcycle", 10, 2, None, False),
        ("matching", 9, 3, None, True),
        ("matching", 10, 3, None, False),
        ("factor", 10, 3, 5, True),
        ("factor", 10, 3, None, False),
        ("audit", 7, 3, None, True),
    ])
    def test_screen(self, task, n, k, f, expected):
        assert divisible(task, n, k, f) is expected
