"""
Unit tests for configuration and request/report models
"""

import pytest
from pydantic import ValidationError

from src.core.config import Config
from src.core.models import ExperimentSpec, PipelineConfig, SpanningCertificate


class TestConfig:

    def test_defaults(self, monkeypatch):
        for name in ("HPR_THREADS", "HPR_LOG_LEVEL", "HPR_MAX_K", "API_PORT"):
            monkeypatch.delenv(name, raising=False)
        cfg = Config()
        assert cfg.threads == 1
        assert cfg.max_k == 8
        assert cfg.validate() == (True, [])

    def test_reads_environment(self, monkeypatch):
        monkeypatch.setenv("HPR_THREADS", "4")
        monkeypatch.setenv("HPR_LOG_LEVEL", "debug")
        monkeypatch.setenv("API_PORT", "9001")
        cfg = Config()
        assert cfg.threads == 4
        assert cfg.log_level == "DEBUG"
        assert cfg.api_url.endswith(":9001")

    def test_validate_reports_errors(self, monkeypatch):
        monkeypatch.setenv("HPR_THREADS", "0")
        monkeypatch.setenv("HPR_LOG_LEVEL", "LOUD")
        monkeypatch.setenv("HPR_SEARCH_BUDGET", "0")
        ok, errors = Config().validate()
        assert not ok
        assert "HPR_THREADS must be at least 1" in errors
        assert "search_budget must be positive" in errors
        assert any("HPR_LOG_LEVEL" in e for e in errors)


class TestPipelineConfig:

    def test_hierarchy(self):
        with pytest.raises(ValidationError, match="gamma < beta < alpha_frac"):
            PipelineConfig(gamma=0.2, beta=0.1, alpha_frac=0.3)

    def test_scale_m(self):
        cfg = PipelineConfig()
        assert cfg.scale_m(100, ham=False) == 2
        assert cfg.scale_m(100, ham=True) == 1
        assert PipelineConfig(template_m=3).scale_m(100, ham=True) == 3
        assert PipelineConfig(mode="strict").scale_m(101, ham=False) == 6

    def test_z_split_offset(self):
        assert PipelineConfig(z_offset=2).z_split_offset(500) == 2
        assert PipelineConfig(mode="strict").z_split_offset(150) == 2

    def test_mode_values(self):
        with pytest.raises(ValidationError):
            PipelineConfig(mode="fast")

    def test_greedy_shortcut_is_opt_in(self):
        assert PipelineConfig().greedy_first is False


class TestExperimentSpec:

    def test_from_axes(self):
        spec = ExperimentSpec.from_axes("matching", [9, 12], [0.5, 1.0], [0, 1])
        assert len(spec.grid) == 8
        assert (spec.grid[0].n, spec.grid[0].p, spec.grid[0].seed) == (9, 0.5, 0)

    def test_empty_grid(self):
        with pytest.raises(ValidationError, match="grid must not be empty"):
            ExperimentSpec.from_axes("audit", [], [0.5], [0])

    def test_unknown_task(self):
        with pytest.raises(ValidationError):
            ExperimentSpec.from_axes("coloring", [9], [0.5], [0])


class TestCertificateModel:

    def test_json_round_trip(self):
        cert = SpanningCertificate(kind="matching", k=3, n=6, pieces=[[0, 1, 2], [3, 4, 5]], route="greedy")
        again = SpanningCertificate.model_validate_json(cert.model_dump_json())
        assert again == cert
        assert not again.verified
