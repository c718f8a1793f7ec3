"""Mathieu characteristic exponents from the Hill determinant.

The determinant ``Delta(a, 0)`` is computed by a third-order recursion (or,
equivalently, by an explicit solution of that recursion) and turned into
exponents through the Whittaker-Hill formula.  An ODE integrator of the
Mathieu equation serves as an independent check.
"""

from .coefficients import CharacteristicExponent, MathieuParams, Stability, alpha, beta, xi
from .errors import (DegenerateB, HillwaveError, IndexOutOfValidity, NearPole, NoBracket,
                     NoConvergence, NotNearSingular, StepFailure)
from .hill_determinant import delta_series, delta_zero, det_direct
from .whittaker_hill import band_edges, band_scan, solve_exponent, wh_rhs

__version__ = "0.1.0"

__all__ = [
    "CharacteristicExponent", "MathieuParams", "Stability", "alpha", "beta", "xi",
    "DegenerateB", "HillwaveError", "IndexOutOfValidity", "NearPole", "NoBracket",
    "NoConvergence", "NotNearSingular", "StepFailure",
    "delta_series", "delta_zero", "det_direct",
    "band_edges", "band_scan", "solve_exponent", "wh_rhs",
]
