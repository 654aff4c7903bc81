#!/usr/bin/env python3
"""
Exception types shared across the toolkit
"""

from typing import Any, Dict, Optional


class HypergraphError(ValueError):
    """Malformed hypergraph input or an operation applied outside its domain"""


class DivisibilityError(ValueError):
    """Vertex count incompatible with the requested spanning structure"""


class BudgetExceededError(RuntimeError):
    """An exhaustive check or search ran past its configured budget"""

    def __init__(self, message: str, budget: int = 0, explored: int = 0):
        super().__init__(message)
        self.budget = budget
        self.explored = explored


class TemplateConstructionError(RuntimeError):
    """Template builder ran out of retries"""

    def __init__(self, message: str, attempts: Optional[list] = None):
        super().__init__(message)
        self.attempts = attempts or []


class PhaseFailure(RuntimeError):
    """A pipeline phase could not complete"""

    def __init__(self, phase: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(f"[{phase}] {message}")
        self.phase = phase
        self.details = details or {}


class StrictModeRefusal(PhaseFailure):
    """Strict-mode preconditions do not hold for this instance"""


class CertificateError(RuntimeError):
    """A produced certificate failed self-verification"""

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = violations or []
