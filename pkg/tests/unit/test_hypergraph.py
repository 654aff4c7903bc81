"""
Unit tests for the k-uniform hypergraph core
"""

from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import HypergraphError
from src.core.hypergraph import (Hypergraph, RootedMotif, content_digest, degree_into, degree_report,
                                 degree_vector, edges_inside, format_hg, induced, is_linear,
                                 labelled_edge_count, line_graph, max_vertices, parse_hg, read_hg,
                                 validate_rooted, write_hg)


def brute_labelled_count(H, sets):
    sets = [set(s) for s in sets]
    total = 0
    for e in H.edge_list():
        for perm in permutations(e):
            if all(v in S for v, S in zip(perm, sets)):
                total += 1
    return total


@st.composite
def small_hypergraphs(draw, k=3, max_n=8):
    n = draw(st.integers(min_value=k, max_value=max_n))
    pool = list(combinations(range(n), k))
    chosen = draw(st.lists(st.sampled_from(pool), unique=True, max_size=12))
    return Hypergraph(k, n, chosen)


class TestConstruction:
    """Edge normalisation and input validation"""

    def test_edges_are_sorted_and_ordered(self):
        H = Hypergraph(3, 5, [(4, 2, 3), (2, 1, 0)])
        assert H.edge_list() == [(0, 1, 2), (2, 3, 4)]
        assert H.num_edges == 2
        assert len(H) == 2

    def test_rejects_small_uniformity(self):
        with pytest.raises(HypergraphError, match="at least 2"):
            Hypergraph(1, 4, [(0,)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(HypergraphError, match="Duplicate"):
            Hypergraph(3, 4, [(0, 1, 2), (2, 1, 0)])

    def test_rejects_out_of_range_vertex(self):
        with pytest.raises(HypergraphError, match="out of range"):
            Hypergraph(3, 3, [(0, 1, 3)])

    def test_rejects_repeated_vertex(self):
        with pytest.raises(HypergraphError, match="distinct"):
            Hypergraph(3, 4, [(0, 0, 1)])

    def test_rejects_wrong_arity(self):
        with pytest.raises(HypergraphError):
            Hypergraph(3, 4, [(0, 1)])

    def test_edge_code_limit_names_the_largest_n(self):
        assert max_vertices(8) == 234
        assert Hypergraph.empty(8, 234).n == 234
        with pytest.raises(HypergraphError, match="k=8 allows n <= 234, got n=235"):
            Hypergraph.empty(8, 235)

    def test_empty(self):
        H = Hypergraph.empty(4, 10)
        assert H.num_edges == 0
        assert H.edges.shape == (0, 4)
        assert H.vertex_degrees.tolist() == [0] * 10

    def test_from_edges_infers_k_and_n(self):
        H = Hypergraph.from_edges([[0, 1, 5], [1, 2, 3]])
        assert (H.k, H.n) == (3, 6)
        assert Hypergraph.from_edges([[0, 1]], n=9).n == 9

    def test_from_edges_empty_list(self):
        with pytest.raises(HypergraphError, match="empty"):
            Hypergraph.from_edges([])

    def test_edges_are_read_only(self):
        H = Hypergraph(2, 3, [(0, 1)])
        with pytest.raises(ValueError):
            H.edges[0, 0] = 2

    def test_equality_and_hash(self):
        a = Hypergraph(3, 5, [(0, 1, 2), (1, 3, 4)])
        b = Hypergraph(3, 5, [(4, 3, 1), (2, 0, 1)])
        assert a == b
        assert hash(a) == hash(b)
        assert a != Hypergraph(3, 6, [(0, 1, 2), (1, 3, 4)])


class TestLookup:
    """Edge index, incidence and vertex masks"""

    def test_edge_index(self):
        H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5), (1, 3, 5)])
        assert H.has_edge([5, 3, 1])
        assert H.edge(H.edge_index([2, 1, 0])) == (0, 1, 2)
        assert H.edge_index([0, 1, 3]) == -1
        assert H.edge_index([0, 0, 1]) == -1
        assert H.edge_index([0, 1, 9]) == -1
        assert H.edge_index([0, 1]) == -1

    def test_incidence(self):
        H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5), (1, 3, 5)])
        assert [H.edge(i) for i in H.incident_edges(1)] == [(0, 1, 2), (1, 3, 5)]
        assert H.incidence[0] == frozenset({0})
        assert H.vertex_degrees.tolist() == [1, 2, 1, 2, 1, 2]

    def test_codegree(self, complete):
        H = complete(3, 6)
        assert H.codegree(0, 1) == 4
        assert H.codegree(2, 2) == 0

    def test_vertex_mask_copies_boolean_input(self):
        H = Hypergraph.empty(2, 4)
        mask = np.array([True, False, True, False])
        out = H.vertex_mask(mask)
        out[1] = True
        assert not mask[1]

    def test_vertex_mask_range_check(self):
        H = Hypergraph.empty(2, 4)
        with pytest.raises(HypergraphError):
            H.vertex_mask([0, 4])
        with pytest.raises(HypergraphError):
            H.vertex_mask(np.zeros(3, dtype=bool))

    def test_incident_edges_range_check(self):
        with pytest.raises(HypergraphError):
            Hypergraph.empty(3, 4).incident_edges(4)


class TestCounting:
    """Labelled edge counts and labelled degrees"""

    def test_complete_graph_counts_ordered_tuples(self, complete):
        H = complete(3, 6)
        V = range(6)
        assert labelled_edge_count(H, V, V, V) == 6 * 5 * 4

    def test_disjoint_parts(self, complete):
        H = complete(3, 6)
        assert labelled_edge_count(H, [0, 1], [2, 3], [4, 5]) == 8

    def test_wrong_number_of_sets(self, complete):
        with pytest.raises(HypergraphError, match="Expected 3"):
            labelled_edge_count(complete(3, 4), [0], [1])

    @settings(max_examples=40, deadline=None)
    @given(H=small_hypergraphs(), data=st.data())
    def test_matches_brute_force(self, H, data):
        subset = st.lists(st.integers(min_value=0, max_value=H.n - 1), unique=True)
        sets = [data.draw(subset) for _ in range(H.k)]
        assert labelled_edge_count(H, *sets) == brute_labelled_count(H, sets)

    @settings(max_examples=40, deadline=None)
    @given(H=small_hypergraphs(), data=st.data())
    def test_degree_vector_agrees_with_degree_into(self, H, data):
        S = data.draw(st.lists(st.integers(min_value=0, max_value=H.n - 1), unique=True))
        vector = degree_vector(H, S)
        for v in range(H.n):
            assert vector[v] == degree_into(H, v, S, S)

    def test_degree_vector_is_labelled(self, complete):
        H = complete(3, 5)
        assert degree_vector(H, range(5)).tolist() == [12] * 5

    def test_degree_report(self, complete):
        report = degree_report(complete(3, 5))
        assert report.min_vertex_degree == 12
        assert report.max_pair_degree == 3
        assert report.density == pytest.approx(6 * 10 / 125)
        assert report.num_edges == 10


class TestPredicates:
    """Linearity, line graphs and induced subgraphs"""

    def test_fano_is_linear(self, fano):
        assert is_linear(fano)
        assert line_graph(fano).num_edges == 21

    def test_complete_graph_is_not_linear(self, complete):
        assert not is_linear(complete(3, 4))

    def test_induced_relabels(self):
        H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5), (1, 3, 5)])
        sub = induced(H, [1, 3, 5, 4])
        assert sub.n == 4
        assert sub.labels == (1, 3, 4, 5)
        assert [tuple(sub.labels[v] for v in e) for e in sub.edge_list()] == [(1, 3, 5), (3, 4, 5)]

    def test_edges_inside(self):
        H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5), (1, 3, 5)])
        assert edges_inside(H, [1, 3, 4, 5]).tolist() == [H.edge_index([1, 3, 5]), H.edge_index([3, 4, 5])]


class TestRootedValidation:
    """Root separation and end placement"""

    def test_separated_roots(self):
        G = Hypergraph(3, 7, [(0, 1, 2), (2, 3, 4), (4, 5, 6)])
        ok, violations = validate_rooted(RootedMotif(G, (0, 6)))
        assert ok, violations

    def test_roots_in_intersecting_edges(self):
        G = Hypergraph(3, 5, [(0, 1, 2), (2, 3, 4)])
        ok, violations = validate_rooted(RootedMotif(G, (0, 4)))
        assert not ok
        assert any("intersect" in v for v in violations)

    def test_ends_meeting_roots(self):
        G = Hypergraph(3, 7, [(0, 1, 2), (2, 3, 4), (4, 5, 6)])
        ok, violations = validate_rooted(RootedMotif(G, (0, 6), ends=(0, 5)))
        assert not ok
        assert any("meet roots" in v for v in violations)

    def test_non_linear_motif(self, complete):
        ok, violations = validate_rooted(RootedMotif(complete(3, 4)))
        assert not ok


class TestHgFormat:
    """Text format parsing and writing"""

    def test_parse_skips_comments_and_blank_lines(self):
        H = parse_hg("# demo\n3 5\n\n0 1 2\n# inner\n2 3 4\n")
        assert H.edge_list() == [(0, 1, 2), (2, 3, 4)]

    @pytest.mark.parametrize("text,message", [
        ("", "missing 'k n' header"),
        ("3\n0 1 2\n", "header must be 'k n'"),
        ("3 5\n0 1\n", "expected 3 vertices"),
        ("3 5\n0 1 x\n", "non-integer token"),
    ])
    def test_parse_errors(self, text, message):
        with pytest.raises(HypergraphError, match=message):
            parse_hg(text)

    def test_write_and_read(self, tmp_path):
        H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5)])
        path = write_hg(H, tmp_path / "g.hg", comment="two edges")
        assert path.read_text().startswith("# two edges\n3 6\n")
        assert read_hg(path) == H

    def test_read_rejects_non_utf8(self, tmp_path):
        path = tmp_path / "bad.hg"
        path.write_bytes(b"\xff\xfe k=3")
        with pytest.raises(HypergraphError, match="not UTF-8"):
            read_hg(path)

    def test_digest_ignores_comments(self):
        H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5)])
        assert content_digest(H) == content_digest(parse_hg(format_hg(H, "anything")))
        assert content_digest(H) != content_digest(Hypergraph(3, 6, [(0, 1, 2)]))
