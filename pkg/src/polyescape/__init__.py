"""Escape analysis for linear dynamical systems on compact polytopes."""

from .bounds import EscapeCertificate, escape_bound
from .decide import Decision, Instance, Mode, Outcome, decide
from .lp import Polytope

__version__ = "0.1.0"

__all__ = [
    "Decision",
    "EscapeCertificate",
    "Instance",
    "Mode",
    "Outcome",
    "Polytope",
    "decide",
    "escape_bound",
]
