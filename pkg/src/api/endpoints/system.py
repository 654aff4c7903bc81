"""
System-related API endpoints
"""

from fastapi import APIRouter

from src.core.config import config
from src.core.models import AUDIT_DISTRIBUTION_VERSION, TOOL_VERSION

router = APIRouter()


@router.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy"}


@router.get("/status")
async def get_status():
    """Configuration limits in effect"""
    valid, errors = config.validate()
    return {
        "tool_version": TOOL_VERSION,
        "audit_distribution": AUDIT_DISTRIBUTION_VERSION,
        "config_valid": valid,
        "config_errors": errors,
        "limits": {
            "threads": config.threads,
            "max_k": config.max_k,
            "exhaustive_budget": config.exhaustive_budget,
            "flex_budget": config.flex_budget,
            "search_budget": config.search_budget,
        },
    }
