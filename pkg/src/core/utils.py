#!/usr/bin/env python3
"""
Utility functions for the hypergraph absorption toolkit
"""

import sys
import hashlib
import logging

from src.core.config import config


def setup_logging() -> logging.Logger:
    """Configure logging for the application"""
    logging.basicConfig(
        level=getattr(logging, config.log_level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    return logging.getLogger(__name__)


def calculate_hash(text: str) -> str:
    """Calculate SHA-256 digest for text"""
    return hashlib.sha256(text.encode()).hexdigest()


def print_usage():
    """Print usage information"""
    print("Usage: python -m src.main [cli|api] ...")
    print("  cli  - Run command-line tool (default)")
    print("  api  - Run API server")
    sys.exit(2)
