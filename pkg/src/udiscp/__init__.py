"""Distributed constraint solving with privacy-aware utilitarian agents.

The package couples a problem model (satisfaction and optimization
variants, revelation-cost matrices, agreement rewards) with a
deterministic multi-agent simulation engine, five classic distributed
solvers plus their privacy-preserving utilitarian twins, a calibrated
meeting-scheduling instance generator and an experiment runner measuring
privacy loss.
"""

from . import csp_solvers, dcop_solvers  # noqa: F401  (populates the registry)
from .engine import RunLimits, RunOutcome, detect_termination, run, solver_names
from .model import (
    Problem, PrivacyCosts, brute_force_solve, evaluate_assignment,
    is_consistent, parse, serialize, utility,
)
from .privacy import PrivacyReport, Revelation, RevelationLedger, report

__all__ = [
    "Problem", "PrivacyCosts", "PrivacyReport", "Revelation",
    "RevelationLedger", "RunLimits", "RunOutcome", "brute_force_solve",
    "detect_termination", "evaluate_assignment", "is_consistent", "parse",
    "report", "run", "serialize", "solver_names", "utility",
]

__version__ = "0.1.0"
