"""Discrete phase-space calculus for a qubit and for qudits of odd prime dimension."""

from . import checks, correspondence, dynamics, matrix, prime, qubit, traceio
from .common import BracketKind

__version__ = "0.1.0"

__all__ = ["BracketKind", "checks", "correspondence", "dynamics", "matrix", "prime", "qubit", "traceio"]
