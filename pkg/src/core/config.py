#!/usr/bin/env python3
"""
Configuration management for the hypergraph absorption toolkit
"""

import os
from dataclasses import dataclass

# Try to load .env file if python-dotenv is available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv not installed, will use system environment variables
    pass


@dataclass
class Config:
    """System configuration from environment variables"""

    # Parallelism
    threads: int = 1

    # Logging
    log_level: str = "INFO"

    # Limits
    max_k: int = 8
    exhaustive_budget: int = 10 ** 8
    flex_budget: int = 10 ** 6
    search_budget: int = 2 * 10 ** 6

    # Experiment output
    output_dir: str = "results"

    # API Server Configuration
    api_host: str = "0.0.0.0"
    api_port: int = 8000

    def __init__(self):
        """Initialize configuration from environment variables"""
        self.threads = int(os.getenv("HPR_THREADS", "1"))
        self.log_level = os.getenv("HPR_LOG_LEVEL", "INFO").upper()
        self.max_k = int(os.getenv("HPR_MAX_K", "8"))
        self.exhaustive_budget = int(os.getenv("HPR_EXHAUSTIVE_BUDGET", str(10 ** 8)))
        self.flex_budget = int(os.getenv("HPR_FLEX_BUDGET", str(10 ** 6)))
        self.search_budget = int(os.getenv("HPR_SEARCH_BUDGET", str(2 * 10 ** 6)))
        self.output_dir = os.getenv("HPR_OUTPUT_DIR", "results")
        self.api_host = os.getenv("API_HOST", "0.0.0.0")
        self.api_port = int(os.getenv("API_PORT", "8000"))

    @property
    def api_url(self) -> str:
        """Get the full API URL"""
        return f"http://{self.api_host}:{self.api_port}"

    def validate(self) -> tuple[bool, list[str]]:
        """Validate configuration and return status and errors"""
        errors = []

        if self.threads < 1:
            errors.append("HPR_THREADS must be at least 1")

        if self.max_k < 2:
            errors.append("HPR_MAX_K must be at least 2")

        for name in ("exhaustive_budget", "flex_budget", "search_budget"):
            if getattr(self, name) <= 0:
                errors.append(f"{name} must be positive")

        if self.log_level not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            errors.append("HPR_LOG_LEVEL must be a standard logging level name")

        if self.api_port <= 0 or self.api_port > 65535:
            errors.append("API port must be between 1 and 65535")

        return len(errors) == 0, errors


# Global configuration instance
config = Config()
