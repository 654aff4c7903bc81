"""
Unit tests for (r, m)-templates
"""

import numpy as np
import pytest

from src.core.errors import BudgetExceededError, HypergraphError, TemplateConstructionError
from src.structures.templates import (Template, build_template, extend_template, matching_after_removal,
                                      place_template, structure_violations, template_from_json,
                                      template_to_json, verify_flexibility)


@pytest.fixture
def rigid():
    """m = 1 template where removing vertex 1 strands vertices 0 and 3 on the same partner"""
    return Template(2, 1, np.array([(0, 4), (1, 5), (2, 6), (3, 4)]))


@pytest.fixture(scope="module")
def built():
    return build_template(3, 2, seed=0)


class TestLayout:

    def test_parts(self, built):
        assert built.num_vertices == 20
        assert built.part(0) == range(0, 8)
        assert built.part(1) == range(8, 14)
        assert built.part(2) == range(14, 20)
        assert built.clone(8, 2) == 14
        assert built.flexible == (0, 1, 2, 3)

    def test_structure(self, built):
        assert structure_violations(built) == []
        assert built.max_degree <= 40
        assert built.stats["verification"] == "exhaustive"

    def test_clone_columns(self, built):
        assert np.array_equal(built.edges[:, 2], built.edges[:, 1] + 6)

    def test_extend(self, rigid):
        T4 = extend_template(rigid, 4)
        assert T4.r == 4
        assert T4.edge_list()[0] == (0, 4, 7, 10)
        assert structure_violations(T4) == []

    def test_extend_only_from_two(self, built):
        with pytest.raises(HypergraphError, match="only 2-uniform"):
            extend_template(built, 4)


class TestFlexibility:

    def test_built_template_is_flexible(self, built):
        report = verify_flexibility(built)
        assert report.verdict == "pass"
        assert report.mode == "exhaustive"
        assert report.tested == 6

    @pytest.mark.parametrize("seed", range(5))
    def test_m4_templates_are_exhaustively_flexible(self, seed):
        T = build_template(3, 4, seed=seed)
        report = verify_flexibility(T, mode="exhaustive")
        assert report.tested == 70
        assert report.verdict == "pass"
        assert T.max_degree <= 40
        assert structure_violations(T) == []

    def test_sampled_mode(self, built):
        report = verify_flexibility(built, mode="sampled", trials=10, seed=3)
        assert report.verdict == "pass"
        assert report.tested == 10
        assert "10 trials" in report.note

    def test_rigid_template_fails_with_witness(self, rigid):
        report = verify_flexibility(rigid)
        assert report.verdict == "fail"
        assert report.witness == [1]

    def test_exhaustive_over_budget(self, built):
        with pytest.raises(BudgetExceededError):
            verify_flexibility(built, mode="exhaustive", budget=1)

    def test_unknown_mode(self, built):
        with pytest.raises(ValueError, match="Unknown verification mode"):
            verify_flexibility(built, mode="random")

    def test_matching_after_removal(self, rigid):
        matched = matching_after_removal(rigid, [0])
        assert sorted(matched) == [(1, 5), (2, 6), (3, 4)]
        assert matching_after_removal(rigid, [1]) is None

    def test_removal_must_be_m_flexible_vertices(self, rigid):
        with pytest.raises(HypergraphError, match="must be 1"):
            matching_after_removal(rigid, [0, 1])
        with pytest.raises(HypergraphError, match="flexible"):
            matching_after_removal(rigid, [2])

    def test_lifted_matching_covers_everything_else(self, built):
        removed = [0, 3]
        matched = matching_after_removal(built, removed)
        covered = sorted(v for e in matched for v in e)
        assert covered == [v for v in range(built.num_vertices) if v not in removed]


class TestConstruction:

    def test_same_seed_same_template(self):
        assert template_to_json(build_template(2, 2, seed=5)) == template_to_json(build_template(2, 2, seed=5))

    def test_argument_checks(self):
        with pytest.raises(HypergraphError):
            build_template(1, 2)
        with pytest.raises(HypergraphError):
            build_template(2, 0)
        with pytest.raises(HypergraphError, match="degree cap"):
            build_template(2, 2, degree_cap=0)

    def test_impossible_degree_cap(self):
        with pytest.raises(TemplateConstructionError) as excinfo:
            build_template(2, 1, degree_cap=1, retries=3)
        assert len(excinfo.value.attempts) == 3


class TestSerialization:

    def test_json_round_trip(self, built):
        again = template_from_json(template_to_json(built))
        assert again.r == built.r and again.m == built.m
        assert np.array_equal(again.edges, built.edges)

    def test_invalid_flexible_set(self, rigid):
        data = template_to_json(rigid)
        data["flexible"] = [4, 5]
        with pytest.raises(HypergraphError, match="invalid template"):
            template_from_json(data)


class TestPlacement:

    def test_host_matching(self, rigid):
        placed = place_template(rigid, [[10, 11, 12, 13], [20, 21, 22]])
        assert placed.flexible == [10, 11]
        assert sorted(placed.matching_for([10])) == [(11, 21), (12, 22), (13, 20)]
        assert placed.matching_for([11]) is None
        assert (10, 20) in placed.host_edges()

    def test_unknown_host_vertex(self, rigid):
        placed = place_template(rigid, [[10, 11, 12, 13], [20, 21, 22]])
        with pytest.raises(HypergraphError, match="not a template vertex"):
            placed.matching_for([99])

    @pytest.mark.parametrize("parts,message", [
        ([[10, 11, 12, 13]], "expected 2 host parts"),
        ([[10, 11, 12], [20, 21, 22]], "has 3 vertices"),
        ([[10, 11, 12, 13], [13, 21, 22]], "overlap"),
    ])
    def test_bad_parts(self, rigid, parts, message):
        with pytest.raises(HypergraphError, match=message):
            place_template(rigid, parts)
