"""Small pieces shared by the qubit and prime-dimension phase spaces."""

from __future__ import annotations

import enum
import math


class BracketKind(str, enum.Enum):
    """Which antisymmetric bracket drives a computation."""

    MOYAL = "moyal"
    CLASSICAL = "classical"


def check_hbar(hbar: float) -> float:
    hbar = float(hbar)
    if not (hbar > 0 and math.isfinite(hbar)):
        raise ValueError(f"hbar must be a positive finite number, got {hbar}")
    return hbar
