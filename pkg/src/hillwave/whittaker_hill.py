"""Characteristic exponents from the Whittaker-Hill formula.

    sin^2(pi nu / 2) = Delta(a, 0) * sin^2(pi sqrt(a) / 2),   a != 4 k^2

The right-hand side is real for all real ``a``; for ``a < 0`` the sine
continues to ``(1 - cosh(pi sqrt(-a))) / 2 <= 0``.  Exponents are reported on
the canonical branch ``re in [0, 1]``, ``im >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import EPS_POLE, CharacteristicExponent, MathieuParams, Stability
from .errors import HillwaveError, NearPole, NoBracket, NoConvergence
from .floquet_oracle import discriminant_mu, exponent_from_discriminant
from .hill_determinant import DEFAULT_N_MAX, DEFAULT_TOL, delta_series

FLAG_OK = ""
FLAG_ORACLE = "oracle-only"
SCAN_TOL = 1e-8


def s_factor(a: float) -> float:
    """sin^2(pi sqrt(a) / 2), continued analytically to ``a < 0``."""
    if a >= 0:
        return math.sin(0.5 * math.pi * math.sqrt(a)) ** 2
    return 0.5 * (1.0 - math.cosh(math.pi * math.sqrt(-a)))


def nearest_resonance(a: float) -> int:
    """Index ``k >= 0`` minimising ``|a - 4 k^2|``."""
    if a <= 0:
        return 0
    return int(round(math.sqrt(a) / 2.0))


def is_resonant(a: float, eps_pole: float = EPS_POLE) -> bool:
    k = nearest_resonance(a)
    return abs(a - 4 * k * k) <= eps_pole


@dataclass(frozen=True)
class WhRight:
    value: float
    params: MathieuParams
    delta0: float
    order: int = 0
    tail_estimate: float = 0.0


def wh_rhs(params: MathieuParams, tol: float = DEFAULT_TOL,
           n_max: int = DEFAULT_N_MAX) -> WhRight:
    if params.q != 0 and is_resonant(params.a):
        k = nearest_resonance(params.a)
        raise NearPole(k, params.a - 4 * k * k)
    series = delta_series(params, n_max=n_max, tol=tol)
    if not series.converged:
        raise NoConvergence(n_max)
    d0 = series.limit
    return WhRight(d0 * s_factor(params.a), params, d0, series.order, series.tail_estimate)


def exponent_from_rhs(s: float) -> CharacteristicExponent:
    if 0.0 <= s <= 1.0:
        return CharacteristicExponent(2.0 / math.pi * math.asin(math.sqrt(s)), 0.0, Stability.STABLE)
    if s > 1.0:
        return CharacteristicExponent(1.0, 2.0 / math.pi * math.acosh(math.sqrt(s)),
                                      Stability.UNSTABLE_GAP)
    return CharacteristicExponent(0.0, 2.0 / math.pi * math.asinh(math.sqrt(-s)),
                                  Stability.UNSTABLE_GAP)


def rhs_from_exponent(nu: CharacteristicExponent) -> float:
    """sin^2(pi nu / 2) written with real functions on each branch."""
    if nu.stability is Stability.STABLE:
        return math.sin(0.5 * math.pi * nu.re) ** 2
    half = 0.5 * math.pi * nu.im
    if nu.re == 1.0:
        return math.cosh(half) ** 2
    return -math.sinh(half) ** 2


def solve_exponent(params: MathieuParams, tol: float = DEFAULT_TOL,
                   n_max: int = DEFAULT_N_MAX) -> CharacteristicExponent:
    return exponent_from_rhs(wh_rhs(params, tol, n_max).value)


def delta_at_exponent(params: MathieuParams, nu: complex, delta0: float) -> complex:
    """Delta(a, nu) from Delta(a, 0).

    ``Delta(a, nu) - 1`` is even, 2-periodic in ``nu``, vanishes as
    ``Im nu -> oo`` and has simple poles at ``nu = +-sqrt(a) + 2k``, which
    pins it to ``C / (cos(pi nu) - cos(pi sqrt a))``.
    """
    c = np.cos(np.pi * np.sqrt(complex(params.a)))
    return 1.0 + (delta0 - 1.0) * (1.0 - c) / (np.cos(np.pi * complex(nu)) - c)


@dataclass(frozen=True)
class BandPoint:
    """One node of a band scan.

    ``flag`` is empty for a regular point, ``"oracle-only"`` where the
    formula is invalid (``a = 4k^2``) and the ODE discriminant supplied the
    exponent, or ``"error:<CODE>"`` when no exponent could be produced.
    """

    a: float
    nu: CharacteristicExponent | None
    rhs: float
    flag: str = FLAG_OK
    error: dict | None = field(default=None, compare=False)


def _oracle_point(a: float, q: float) -> BandPoint:
    m = discriminant_mu(MathieuParams(a, q))
    return BandPoint(a, exponent_from_discriminant(m), 0.5 * (1.0 - m), FLAG_ORACLE)


def band_point(a: float, q: float, tol: float = DEFAULT_TOL) -> BandPoint:
    params = MathieuParams(a, q)
    try:
        if q != 0 and is_resonant(a):
            return _oracle_point(a, q)
        r = wh_rhs(params, tol)
        return BandPoint(a, exponent_from_rhs(r.value), r.value)
    except HillwaveError as exc:
        try:
            return _oracle_point(a, q)
        except HillwaveError:
            return BandPoint(a, None, math.nan, f"error:{exc.code}", exc.to_dict())


def band_scan(q: float, a_min: float, a_max: float, steps: int,
              tol: float = DEFAULT_TOL) -> list[BandPoint]:
    """Exponents on ``steps + 1`` equally spaced nodes spanning [a_min, a_max]."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if not a_min <= a_max:
        raise ValueError("a_min must not exceed a_max")
    return [band_point(float(a), q, tol) for a in np.linspace(a_min, a_max, steps + 1)]


def _rhs_continuous(a: float, q: float, tol: float) -> float:
    """The entire function ``(1 - mu(a)) / 2`` evaluated through the formula.

    At the removable points ``a = 4k^2`` the value is taken as the mean of
    two symmetric neighbours, which is accurate to second order.
    """
    if is_resonant(a):
        h = 1e-6
        return 0.5 * (wh_rhs(MathieuParams(a - h, q), tol).value
                      + wh_rhs(MathieuParams(a + h, q), tol).value)
    return wh_rhs(MathieuParams(a, q), tol).value


def bisect(f, lo: float, hi: float, xtol: float, max_iter: int = 200) -> float:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise NoBracket(f"no sign change on [{lo}, {hi}]", lo=lo, hi=hi)
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def band_edges(q: float, a_window: tuple[float, float], tol: float = 1e-12,
               grid: int = 1000, delta_tol: float = DEFAULT_TOL) -> list[float]:
    """Band edges (integer ``nu``) inside ``a_window``, in increasing order.

    Sign changes of ``rhs`` and ``rhs - 1`` are located on a uniform grid
    and refined by bisection to ``tol``.  Gaps narrower than the grid
    spacing can be missed.  For ``q = 0`` every gap is closed and the
    edges ``a = k^2`` are returned exactly.
    """
    lo, hi = a_window
    if lo > hi:
        raise ValueError("a_window must be ordered")
    if q == 0:
        k0 = 0 if lo <= 0 else math.ceil(math.sqrt(lo))
        edges = []
        k = k0
        while k * k <= hi:
            if k * k >= lo:
                edges.append(float(k * k))
            k += 1
        return edges
    nodes = np.linspace(lo, hi, grid + 1)
    coarse = [_rhs_continuous(float(x), q, max(delta_tol, SCAN_TOL)) for x in nodes]
    edges = []
    for target in (0.0, 1.0):
        f = lambda x: _rhs_continuous(x, q, delta_tol) - target
        for x0, x1, v0, v1 in zip(nodes[:-1], nodes[1:], coarse[:-1], coarse[1:]):
            if (v0 - target) * (v1 - target) < 0.0:
                edges.append(bisect(f, float(x0), float(x1), tol))
        for x, v in ((nodes[0], coarse[0]), (nodes[-1], coarse[-1])):
            if v == target:
                edges.append(float(x))
    return sorted(edges)
