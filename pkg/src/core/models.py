#!/usr/bin/env python3
"""
Data models for the hypergraph absorption toolkit
"""

import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.core.config import config

TOOL_VERSION = "1.0.0"
AUDIT_DISTRIBUTION_VERSION = "v1"


class GenSpec(BaseModel):
    """Parameters of a seeded random k-graph"""
    k: int = Field(ge=2)
    n: int = Field(ge=0)
    p: float = Field(ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def check_size(self):
        if self.n < self.k:
            raise ValueError("n must be at least k")
        if self.k > config.max_k:
            raise ValueError(f"k must not exceed {config.max_k}")
        return self


class PseudoParams(BaseModel):
    """(p, alpha, eps) of the pseudo-randomness condition"""
    p: float = Field(gt=0.0, le=1.0)
    alpha: float = Field(gt=0.0, le=1.0)
    eps: float = Field(gt=0.0, le=1.0)


class RestrictedParams(BaseModel):
    """Parameters inherited by an induced subgraph, with the vacuity flag"""
    p: float
    alpha: float
    eps: float
    vacuous: bool = False


class AuditReport(BaseModel):
    """Outcome of a pseudo-randomness or jumbledness audit"""
    criterion: Literal["pseudo_random", "jumbled"]
    mode: Literal["exhaustive", "sampled"]
    trials: int
    verdict: Literal["pass", "fail", "inconclusive"]
    worst_sets: List[List[int]] = []
    worst_descriptors: List[str] = []
    worst_count: Optional[int] = None
    worst_expected: Optional[float] = None
    worst_error: float = 0.0
    hypergraph_hash: str
    params: Dict[str, float] = {}
    distribution_version: str = AUDIT_DISTRIBUTION_VERSION
    tool_version: str = TOOL_VERSION
    note: str = ""


class SpectralReport(BaseModel):
    """Eigenvalue estimates of the edge-indicator form"""
    lambda1: float
    lambda2: float
    iterations: int
    restarts: int
    converged: bool
    exact_lambda1: Optional[float] = None
    exact_lambda2: Optional[float] = None
    trace: List[float] = []
    method: str = "alternating maximization (lower-bound estimate)"
    hypergraph_hash: str = ""
    tool_version: str = TOOL_VERSION


class DensityFloorReport(BaseModel):
    """Independent-set refutation of pseudo-randomness at a given density"""
    independent_set_size: int
    independent_set: List[int] = []
    threshold: float
    density: float
    refuted: bool
    s_exponent: float
    ell: int


class FlexibilityReport(BaseModel):
    """Outcome of checking that every m-subset removal leaves a perfect matching"""
    mode: Literal["exhaustive", "sampled"]
    tested: int
    verdict: Literal["pass", "fail"]
    witness: Optional[List[int]] = None
    note: str = ""


class PipelineConfig(BaseModel):
    """Explicit values for the constant hierarchy of the absorption pipeline"""
    c: float = Field(default=0.1, gt=0.0, lt=1.0)
    gamma: float = Field(default=0.01, gt=0.0, lt=1.0)
    beta: float = Field(default=0.05, gt=0.0, lt=1.0)
    alpha_frac: float = Field(default=0.1, gt=0.0, lt=1.0)
    eps: float = Field(default=0.1, gt=0.0, le=1.0)
    delta: int = Field(default=40, ge=1)
    p: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)
    mode: Literal["strict", "pragmatic"] = "pragmatic"

    search_budget: int = Field(default_factory=lambda: config.search_budget, gt=0)
    flex_budget: int = Field(default_factory=lambda: config.flex_budget, gt=0)
    closing_budget: int = Field(default=200_000, gt=0)
    template_retries: int = Field(default=25, gt=0)
    template_rounds: Optional[int] = Field(default=None, gt=0)

    template_m: Optional[int] = Field(default=None, gt=0)
    z_offset: int = Field(default=0, ge=0)
    trim_slack: int = Field(default=2, ge=0)
    family_reserve_fraction: float = Field(default=0.25, gt=0.0, lt=1.0)
    degree_audit_min_size: int = Field(default=10, ge=1)
    rewind: int = Field(default=3, ge=0)
    greedy_first: bool = False

    @model_validator(mode="after")
    def check_hierarchy(self):
        if not self.gamma < self.beta < self.alpha_frac:
            raise ValueError("constants must satisfy gamma < beta < alpha_frac")
        return self

    @property
    def strict(self) -> bool:
        return self.mode == "strict"

    def scale_m(self, n: int, ham: bool) -> int:
        """Template scale m for a host on n vertices"""
        if self.strict:
            return math.ceil(self.beta * n)
        if self.template_m is not None:
            return self.template_m
        return 1 if ham else 2

    def z_split_offset(self, n: int) -> int:
        """Offset between |Z_1| = m + g and |Z_2| = m - g"""
        if self.strict:
            return math.ceil(self.gamma * n)
        return self.z_offset


class SpanningCertificate(BaseModel):
    """Perfect matching, F-factor or loose Hamilton cycle with provenance"""
    kind: Literal["matching", "factor", "ham_cycle"]
    k: int
    n: int
    pieces: List[List[int]]
    provenance: List[str] = []
    motif: Optional[List[List[int]]] = None
    motif_vertices: Optional[int] = None
    ell: Optional[int] = None
    alpha_threshold: Optional[float] = None
    route: str = ""
    z_prime: List[int] = []
    config: Dict[str, Any] = {}
    phase_seconds: Dict[str, float] = {}
    verified: bool = False
    violations: List[str] = []
    hypergraph_hash: str = ""
    tool_version: str = TOOL_VERSION


class GridPoint(BaseModel):
    n: int = Field(ge=1)
    p: float = Field(ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)


class ExperimentSpec(BaseModel):
    """Batch of solve/audit runs over a grid of (n, p, seed)"""
    task: Literal["matching", "factor", "hamcycle", "audit"]
    k: int = Field(default=3, ge=2)
    grid: List[GridPoint]
    motif: Optional[str] = None
    output: str = Field(default_factory=lambda: config.output_dir)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    audit_alpha: float = Field(default=0.1, gt=0.0, le=1.0)
    audit_eps: float = Field(default=0.2, gt=0.0, le=1.0)
    audit_trials: int = Field(default=200, ge=1)

    @field_validator("grid")
    @classmethod
    def grid_not_empty(cls, grid):
        if not grid:
            raise ValueError("grid must not be empty")
        return grid

    @classmethod
    def from_axes(cls, task: str, ns: List[int], ps: List[float], seeds: List[int], **kwargs) -> "ExperimentSpec":
        grid = [GridPoint(n=n, p=p, seed=s) for n in ns for p in ps for s in seeds]
        return cls(task=task, grid=grid, **kwargs)


class ExperimentRow(BaseModel):
    n: int
    p: float
    seed: int
    status: str
    success: bool
    seconds: float = 0.0
    phase_seconds: Dict[str, float] = {}
    certificate_size: int = 0
    route: str = ""
    audit_verdict: str = ""
    audit_error: Optional[float] = None
    message: str = ""


# ---------------------------------------------------------------- API models


class HypergraphPayload(BaseModel):
    """Hypergraph in request bodies"""
    k: int = Field(ge=2)
    n: int = Field(ge=0)
    edges: List[List[int]] = []


class DegenRequest(BaseModel):
    motif: HypergraphPayload
    roots: List[int] = []


class DegenResponse(BaseModel):
    degen: int
    min_edge_degree: Optional[int] = None
    max_edge_degree: Optional[int] = None
    exposure: List[int]
    weights: List[int]


class VerifyRequest(BaseModel):
    hypergraph: HypergraphPayload
    certificate: SpanningCertificate
    motif: Optional[HypergraphPayload] = None


class VerifyResponse(BaseModel):
    valid: bool
    violations: List[str]


class AuditRequest(BaseModel):
    hypergraph: HypergraphPayload
    params: PseudoParams
    mode: Literal["exhaustive", "sampled"] = "sampled"
    trials: int = Field(default=200, ge=1)
    seed: int = 0


class AbsorberRequest(BaseModel):
    kind: Literal["factor", "path"]
    k: int = Field(default=3, ge=2)
    motif: Optional[str] = None
