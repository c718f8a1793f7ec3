"""Independent check: integrate the Mathieu ODE over one period.

The fundamental pair ``psi1(0)=1, psi1'(0)=0`` and ``psi2(0)=0,
psi2'(0)=1`` is propagated across ``[0, pi]`` with an adaptive embedded
Runge-Kutta 8(5,3) scheme.  Half the trace of the period map is Kohn's
discriminant ``mu(a)`` and ``cos(pi nu) = mu(a)``.  None of this touches the
determinant machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .coefficients import CharacteristicExponent, MathieuParams, Stability
from .errors import StepFailure

PERIOD = math.pi
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
METHOD = "DOP853"


@dataclass(frozen=True)
class FundamentalPair:
    psi1_end: float
    dpsi1_end: float
    psi2_end: float
    dpsi2_end: float

    @property
    def wronskian(self) -> float:
        return self.psi1_end * self.dpsi2_end - self.dpsi1_end * self.psi2_end

    @property
    def wronskian_defect(self) -> float:
        """``|W - 1|`` relative to the size of the two products forming ``W``.

        In gaps the solutions grow like ``exp(pi |Im nu|)`` and ``W`` is the
        difference of two large numbers, so the absolute defect is limited
        by rounding of that difference rather than by the integrator.
        """
        scale = max(1.0, abs(self.psi1_end * self.dpsi2_end) + abs(self.dpsi1_end * self.psi2_end))
        return abs(self.wronskian - 1.0) / scale

    @property
    def mu(self) -> float:
        return 0.5 * (self.psi1_end + self.dpsi2_end)


def _rhs(params: MathieuParams):
    a, q = params.a, params.q

    def f(z, y):
        w = a - 2.0 * q * math.cos(2.0 * z)
        return [y[1], -w * y[0], y[3], -w * y[2]]

    return f


def _integrate(params: MathieuParams, z_end: float, rtol: float, atol: float, t_eval=None):
    sol = solve_ivp(_rhs(params), (0.0, z_end), [1.0, 0.0, 0.0, 1.0], method=METHOD,
                    rtol=rtol, atol=atol, t_eval=t_eval)
    if sol.status != 0:
        raise StepFailure(f"integration failed for a={params.a}, q={params.q}: {sol.message}",
                          a=params.a, q=params.q)
    return sol


def integrate_fundamental(params: MathieuParams, rtol: float = DEFAULT_RTOL,
                          atol: float = DEFAULT_ATOL) -> FundamentalPair:
    sol = _integrate(params, PERIOD, rtol, atol)
    y = sol.y[:, -1]
    return FundamentalPair(float(y[0]), float(y[1]), float(y[2]), float(y[3]))


def fundamental_on_grid(params: MathieuParams, z, rtol: float = DEFAULT_RTOL,
                        atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Rows ``psi1, psi1', psi2, psi2'`` sampled at the sorted points ``z >= 0``."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or np.any(z < 0) or np.any(np.diff(z) < 0):
        raise ValueError("z must be a non-negative increasing 1-D grid")
    z_end = float(z[-1])
    if z_end == 0.0:
        return np.array([[1.0], [0.0], [0.0], [1.0]]) * np.ones(len(z))
    return _integrate(params, z_end, rtol, atol, t_eval=z).y


def propagate(params: MathieuParams, psi0: complex, dpsi0: complex, z,
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Solution with initial data ``(psi0, dpsi0)`` and its derivative on ``z``."""
    y = fundamental_on_grid(params, z, rtol, atol)
    return psi0 * y[0] + dpsi0 * y[2], psi0 * y[1] + dpsi0 * y[3]


def discriminant_mu(params: MathieuParams, rtol: float = DEFAULT_RTOL,
                    atol: float = DEFAULT_ATOL) -> float:
    return integrate_fundamental(params, rtol, atol).mu


def exponent_from_discriminant(m: float) -> CharacteristicExponent:
    if abs(m) <= 1.0:
        return CharacteristicExponent(math.acos(m) / math.pi, 0.0, Stability.STABLE)
    if m > 1.0:
        return CharacteristicExponent(0.0, math.acosh(m) / math.pi, Stability.UNSTABLE_GAP)
    return CharacteristicExponent(1.0, math.acosh(-m) / math.pi, Stability.UNSTABLE_GAP)


def exponent_from_mu(params: MathieuParams, rtol: float = DEFAULT_RTOL,
                     atol: float = DEFAULT_ATOL) -> CharacteristicExponent:
    return exponent_from_discriminant(discriminant_mu(params, rtol, atol))


def band_edges_mu(q: float, a_window: tuple[float, float], grid: int = 1000,
                  xtol: float = 1e-13, rtol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL) -> list[float]:
    """Values of ``a`` in the window where ``|mu(a)| = 1``."""
    lo, hi = a_window
    nodes = np.linspace(lo, hi, grid + 1)
    vals = [discriminant_mu(MathieuParams(float(x), q), rtol, atol) for x in nodes]
    edges = []
    for target in (1.0, -1.0):
        f = lambda x: discriminant_mu(MathieuParams(x, q), rtol, atol) - target
        for x0, x1, v0, v1 in zip(nodes[:-1], nodes[1:], vals[:-1], vals[1:]):
            f0, f1 = v0 - target, v1 - target
            if f0 == 0.0:
                edges.append(float(x0))
            elif f0 * f1 < 0.0:
                edges.append(brentq(f, float(x0), float(x1), xtol=xtol))
        if vals[-1] - target == 0.0:
            edges.append(float(nodes[-1]))
    return sorted(set(edges))
