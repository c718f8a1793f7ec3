"""Mathieu parameters, Hill-matrix entries and their tail bounds.

The normalized Fourier system for a Floquet solution with exponent ``nu``
couples neighbouring coefficients through

    xi_{2k}(nu) = q / ((2k - nu)^2 - a)

and at ``nu = 0`` the determinant recursion is driven by the products
``alpha_i = xi_i xi_{i-1}`` and ``beta_i = 1 - alpha_i``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import NearPole

EPS_POLE = 1e-9


@dataclass(frozen=True)
class MathieuParams:
    """Eigenvalue ``a`` and potential strength ``q`` of the Mathieu equation."""

    a: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.q)):
            raise ValueError(f"a and q must be finite, got a={self.a!r}, q={self.q!r}")

    def as_dict(self) -> dict:
        return {"a": self.a, "q": self.q}


class Stability(enum.Enum):
    STABLE = "Stable"
    UNSTABLE_GAP = "UnstableGap"


@dataclass(frozen=True)
class CharacteristicExponent:
    """Canonical representative of the family ``{+-nu + 2k}``.

    ``re`` lies in [0, 1] for every exponent produced by this package and
    ``im >= 0``.  Inside a gap the real part sits on a band edge (0 or 1).
    """

    re: float
    im: float
    stability: Stability

    def __post_init__(self):
        if not (0.0 <= self.re < 2.0) or self.im < 0.0:
            raise ValueError(f"exponent ({self.re}, {self.im}) outside canonical branch")
        if (self.stability is Stability.STABLE) != (self.im == 0.0):
            raise ValueError("Stable exponents are exactly those with im == 0")
        if self.stability is Stability.UNSTABLE_GAP and self.re not in (0.0, 1.0):
            raise ValueError("gap exponents must have re in {0, 1}")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def is_band_edge(self) -> bool:
        return self.stability is Stability.STABLE and self.re in (0.0, 1.0)

    def as_dict(self) -> dict:
        return {"re": self.re, "im": self.im, "stability": self.stability.value}


@dataclass(frozen=True)
class TailBound:
    order: int
    value: float


def xi(kappa: int, nu: complex, params: MathieuParams, eps_pole: float = EPS_POLE):
    """Off-diagonal entry ``xi_{2 kappa}`` of the normalized Hill matrix.

    Returns a float for real ``nu`` and a complex number otherwise.  With
    ``q == 0`` the entry vanishes identically, so no pole is reported.
    """
    if params.q == 0:
        return 0.0
    denom = (2 * kappa - nu) ** 2 - params.a
    if abs(denom) <= eps_pole:
        raise NearPole(kappa, denom)
    return params.q / denom


def alpha(i: int, params: MathieuParams) -> float:
    if i < 1:
        raise ValueError(f"alpha is defined for i >= 1, got {i}")
    return xi(i, 0.0, params) * xi(i - 1, 0.0, params)


def beta(i: int, params: MathieuParams) -> float:
    return 1.0 - alpha(i, params)


def _tail_integral(y0: float, s: float) -> float:
    """int_{y0}^inf dy / (y^2 - s^2) for y0 > s >= 0."""
    if s == 0.0:
        return 1.0 / y0
    return math.log1p(2.0 * s / (y0 - s)) / (2.0 * s)


def tail_trace_bound(n: int, nu: float, params: MathieuParams) -> TailBound:
    """Upper bound on ``sum_{|k| > n} |xi_{2k}(nu)|``.

    Both half-lines are dominated by ``f(k) = |q| / ((2k - |nu|)^2 - |a|)``,
    which is decreasing and convex once ``2k - |nu| > sqrt|a|``.  Past that
    threshold each term is bounded by the integral of ``f`` over the unit
    interval centred on it; terms before the threshold are summed exactly.
    """
    if n < 1:
        raise ValueError(f"tail bound order must be >= 1, got {n}")
    q = abs(params.q)
    if q == 0.0:
        return TailBound(n, 0.0)
    nu_abs = abs(nu)
    s = math.sqrt(abs(params.a))
    # smallest m with 2m + 1 - |nu| > s
    m0 = max(n, math.floor((s + nu_abs - 1.0) / 2.0) + 1)
    exact = 0.0
    for kappa in range(n + 1, m0 + 1):
        exact += abs(xi(kappa, nu, params)) + abs(xi(-kappa, nu, params))
    y0 = 2.0 * m0 + 1.0 - nu_abs
    tail = q * _tail_integral(y0, s)  # 2 sides * (1/2 from dy = 2 dx)
    return TailBound(n, exact + tail)
