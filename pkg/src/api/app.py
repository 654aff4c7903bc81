"""
FastAPI Application Setup
"""

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from src.core.models import TOOL_VERSION
from src.core.utils import setup_logging

logger = setup_logging()

# FastAPI Application
app = FastAPI(
    title="Hypergraph Absorption API",
    description="Degeneracy, absorbers, audits and certificate verification for k-uniform hypergraphs",
    version=TOOL_VERSION
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Import and include routers
from src.api.endpoints import system, structures

app.include_router(system.router, tags=["system"])
app.include_router(structures.router, prefix="/api", tags=["structures"])


@app.get("/")
async def root():
    """Health check endpoint"""
    return {
        "message": "Hypergraph Absorption API is running!",
        "version": TOOL_VERSION
    }
