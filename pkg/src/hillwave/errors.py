"""Exception hierarchy shared by all numerical modules.

Every error carries a stable ``code`` string; the CLI serializes it verbatim
into the structured error document written to stderr.
"""

from __future__ import annotations


class HillwaveError(Exception):
    """Base class for numerical-domain failures."""

    code = "HILLWAVE_ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class NearPole(HillwaveError):
    code = "NEAR_POLE"

    def __init__(self, kappa: int, denominator: complex, message: str | None = None):
        msg = message or f"denominator (2*kappa - nu)^2 - a = {denominator!r} vanishes at kappa={kappa}"
        super().__init__(msg, kappa=kappa, denominator=abs(denominator))
        self.kappa = kappa


class NoConvergence(HillwaveError):
    code = "NO_CONVERGENCE"

    def __init__(self, n_max: int, message: str | None = None):
        super().__init__(message or f"tolerance not met within n_max={n_max}", n_max=n_max)
        self.n_max = n_max


class DegenerateB(HillwaveError):
    code = "DEGENERATE_B"

    def __init__(self, index: int, value: float):
        super().__init__(f"|b_{index}| = {abs(value):.3e} is below the degeneracy floor",
                         index=index, value=value)
        self.index = index


class IndexOutOfValidity(HillwaveError):
    code = "INDEX_OUT_OF_VALIDITY"


class NotNearSingular(HillwaveError):
    code = "NOT_NEAR_SINGULAR"


class StepFailure(HillwaveError):
    code = "STEP_FAILURE"


class NoBracket(HillwaveError):
    code = "NO_BRACKET"
