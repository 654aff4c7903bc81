"""
Structure API endpoints: degeneracy, absorbers, audits and certificate verification
"""

import logging
from fastapi import APIRouter, HTTPException

from src.audit.pseudo_random import audit_pseudo_random
from src.core.errors import BudgetExceededError, HypergraphError
from src.core.hypergraph import Hypergraph, RootedMotif
from src.core.models import (AbsorberRequest, AuditReport, AuditRequest, DegenRequest, DegenResponse,
                             HypergraphPayload, VerifyRequest, VerifyResponse)
from src.pipeline.drivers import verify_certificate
from src.structures.absorbers import (absorber_degeneracy, absorber_summary, build_factor_absorber,
                                      build_path_absorber, verify_factor_absorber, verify_path_absorber)
from src.structures.degeneracy import edge_degeneracy, min_max_edge_degree
from src.structures.generators import motif as named_motif

logger = logging.getLogger(__name__)
router = APIRouter()


def _hypergraph(payload: HypergraphPayload) -> Hypergraph:
    return Hypergraph(payload.k, payload.n, payload.edges)


@router.post("/degen", response_model=DegenResponse)
async def degeneracy(request: DegenRequest):
    """Rooted edge degeneracy with its witness exposure"""
    try:
        F = _hypergraph(request.motif)
        degen, exposure = edge_degeneracy(RootedMotif(F, tuple(request.roots)))
        low, high = min_max_edge_degree(F)
        return DegenResponse(degen=degen, min_edge_degree=low, max_edge_degree=high,
                             exposure=exposure.order, weights=exposure.weights)
    except HypergraphError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Degeneracy API error: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/verify", response_model=VerifyResponse)
async def verify(request: VerifyRequest):
    """Check a spanning certificate against the given hypergraph"""
    try:
        H = _hypergraph(request.hypergraph)
        F = _hypergraph(request.motif) if request.motif is not None else None
        valid, violations = verify_certificate(H, request.certificate, F)
        logger.info(f"🔍 API verify {request.certificate.kind}: valid={valid}")
        return VerifyResponse(valid=valid, violations=violations)
    except HypergraphError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Verify API error: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/audit", response_model=AuditReport)
async def audit(request: AuditRequest):
    """Pseudo-randomness audit"""
    try:
        H = _hypergraph(request.hypergraph)
        return audit_pseudo_random(H, request.params, mode=request.mode, trials=request.trials,
                                   seed=request.seed, workers=1)
    except (HypergraphError, BudgetExceededError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Audit API error: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/absorber")
async def absorber(request: AbsorberRequest):
    """Build and verify a factor or path absorber"""
    try:
        if request.kind == "path":
            built = build_path_absorber(request.k)
            valid, violations = verify_path_absorber(built)
        else:
            F = named_motif(request.motif or "single_edge", request.k).graph
            built = build_factor_absorber(F)
            valid, violations = verify_factor_absorber(built)
        data = absorber_summary(built)
        data.update({"degen": absorber_degeneracy(built), "valid": valid, "violations": violations})
        return data
    except HypergraphError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Absorber API error: {e}")
        raise HTTPException(status_code=500, detail=str(e))
