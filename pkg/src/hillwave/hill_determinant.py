"""Hill determinant Delta(a, nu) on truncations and in the infinite limit.

Two independent engines are provided:

* :func:`det_direct` evaluates the determinant of an explicit
  ``(2n+1) x (2n+1)`` truncation with the two-term continuant.
* :class:`DeltaRecursion` grows the ``nu = 0`` truncation two rows at a time
  with the third-order recursion

      Delta_i = beta_i Delta_{i-1} - alpha_i beta_i Delta_{i-2}
                + alpha_i alpha_{i-1}^2 Delta_{i-3},

  carrying the minors ``Omega_i = Delta_{i-1} - alpha_i Omega_{i-1}``
  alongside as a cross-check.

The truncations converge only like ``O(n^-3)`` (the increments behave like
``-2 alpha_i Delta``), so the infinite limit is taken by iterating until a
rigorous bound on the remaining increments drops below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coefficients import MathieuParams, alpha, tail_trace_bound, xi
from .errors import NoConvergence

DEFAULT_TOL = 1e-12
DEFAULT_N_MAX = 200_000

_SCALE_EXP = 512
_SCALE_HI = 2.0 ** _SCALE_EXP


@dataclass(frozen=True)
class TruncatedHillMatrix:
    """Tridiagonal truncation with unit diagonal.

    Rows run from ``kappa = +order`` (top) down to ``kappa = -order``; row
    ``kappa`` carries ``xi_{2 kappa}`` on both of its off-diagonal slots, so
    ``sup[r] = xi(order - r)`` and ``sub[r] = xi(order - r - 1)``.
    """

    order: int
    nu: complex
    sup: tuple
    sub: tuple

    @property
    def dim(self) -> int:
        return 2 * self.order + 1

    def dense(self) -> np.ndarray:
        dtype = complex if any(isinstance(v, complex) for v in self.sup + self.sub) else float
        m = np.eye(self.dim, dtype=dtype)
        for r, v in enumerate(self.sup):
            m[r, r + 1] = v
        for r, v in enumerate(self.sub):
            m[r + 1, r] = v
        return m


def build_truncated(n: int, nu: complex, params: MathieuParams) -> TruncatedHillMatrix:
    if n < 0:
        raise ValueError(f"truncation order must be >= 0, got {n}")
    entries = [xi(kappa, nu, params) for kappa in range(n, -n - 1, -1)]
    return TruncatedHillMatrix(order=n, nu=nu, sup=tuple(entries[:-1]), sub=tuple(entries[1:]))


def tridiagonal_det(sup: Sequence, sub: Sequence):
    """Determinant of a unit-diagonal tridiagonal matrix.

    Uses ``D_k = D_{k-1} - sub_{k-1} sup_{k-1} D_{k-2}`` with periodic
    power-of-two rescaling so that long chains cannot overflow.
    """
    if len(sup) != len(sub):
        raise ValueError("sup and sub must have equal length")
    d_prev, d_cur = 1.0, 1.0
    exponent = 0
    for s, t in zip(sup, sub):
        d_prev, d_cur = d_cur, d_cur - s * t * d_prev
        if abs(d_cur) > _SCALE_HI:
            d_prev /= _SCALE_HI
            d_cur /= _SCALE_HI
            exponent += _SCALE_EXP
    if exponent == 0:
        return d_cur
    try:
        return d_cur * 2.0 ** exponent
    except OverflowError:
        return math.copysign(math.inf, d_cur.real if isinstance(d_cur, complex) else d_cur)


def det_direct(m: TruncatedHillMatrix):
    return tridiagonal_det(m.sup, m.sub)


def delta_general(params: MathieuParams, nu: complex, n: int):
    """Delta_n(a, nu): the order-``n`` truncation at arbitrary exponent."""
    return det_direct(build_truncated(n, nu, params))


def _minor_ul(m: TruncatedHillMatrix):
    # first row and first column removed
    return tridiagonal_det(m.sup[1:], m.sub[1:])


@dataclass(frozen=True)
class DeterminantSeries:
    """Immutable record of a run of the ``nu = 0`` recursion.

    ``deltas[i]`` is ``Delta_i`` (dimension ``2i+1``), ``omegas[i]`` the
    minor ``Omega_i`` (``omegas[0] = 1``, the empty determinant) and
    ``increments[i] = Delta_i - Delta_{i-1}`` as accumulated by the engine.
    """

    params: MathieuParams
    deltas: tuple
    omegas: tuple
    increments: tuple
    converged: bool
    tail_estimate: float
    limit: float
    tol: float

    @property
    def order(self) -> int:
        return len(self.deltas) - 1


class DeltaRecursion:
    """Incremental engine for ``Delta_i(a, 0)``.

    Each :meth:`step` evaluates exactly one new matrix entry ``xi_{2i}`` and
    applies one recursion step; nothing already computed is revisited.
    ``xi_evaluations`` and ``steps_taken`` expose that cost for inspection.
    """

    def __init__(self, params: MathieuParams):
        self.params = params
        self.xi_evaluations = 0
        self.steps_taken = 0
        xis = [self._xi(k) for k in range(3)]
        m1 = build_truncated(1, 0.0, params)
        m2 = build_truncated(2, 0.0, params)
        self.deltas = [1.0, det_direct(m1), det_direct(m2)]
        self.omegas = [1.0, _minor_ul(m1), _minor_ul(m2)]
        self.increments = [0.0, self.deltas[1] - 1.0, self.deltas[2] - self.deltas[1]]
        self.alphas = [0.0, xis[1] * xis[0], xis[2] * xis[1]]
        self._xi_last = xis[2]
        # compensated value of the newest Delta
        self._hi = self.deltas[2]
        self._lo = 0.0

    def _xi(self, k: int) -> float:
        self.xi_evaluations += 1
        return xi(k, 0.0, self.params)

    @property
    def order(self) -> int:
        return len(self.deltas) - 1

    def step(self) -> float:
        i = len(self.deltas)
        x = self._xi(i)
        a_i = x * self._xi_last
        self._xi_last = x
        a_prev = self.alphas[i - 1]
        d1, d2, d3 = self.deltas[i - 1], self.deltas[i - 2], self.deltas[i - 3]
        # Delta_i - Delta_{i-1}, grouped so no O(1) terms cancel
        inc = -a_i * d1 - a_i * (1.0 - a_i) * d2 + a_i * a_prev * a_prev * d3
        hi = self._hi + inc
        if abs(self._hi) >= abs(inc):
            self._lo += (self._hi - hi) + inc
        else:
            self._lo += (inc - hi) + self._hi
        self._hi = hi
        value = hi + self._lo
        self.omegas.append(d1 - a_i * self.omegas[i - 1])
        self.alphas.append(a_i)
        self.increments.append(inc)
        self.deltas.append(value)
        self.steps_taken += 1
        return value

    def tail_estimate(self, i: int | None = None) -> float:
        """Bound on ``|Delta_inf - Delta_i|`` (default: the current order).

        With ``M`` the largest of ``|Delta_i|, |Delta_{i-1}|, |Omega_i|`` and
        ``s >= sum_{j>i} |alpha_j|``, the increments obey
        ``|Delta_j - Delta_{j-1}| <= |alpha_j| (2 + |alpha_j|) M_{j-1}`` and
        ``M_j <= M_{j-1} (1 + 3|alpha_j|)``, hence the remainder is at most
        ``3 M s exp(3 s)``.  Returns ``inf`` before the entries are monotone.
        """
        i = self.order if i is None else i
        if self.params.q == 0:
            return 0.0
        a_abs = abs(self.params.a)
        if 4 * i * i <= a_abs + abs(self.params.q):
            return math.inf
        sup_xi = abs(self.params.q) / (4 * i * i - a_abs)
        # one-sided tail of |xi| is half of the symmetric nu = 0 bound
        s = sup_xi * tail_trace_bound(i, 0.0, self.params).value / 2.0
        m = max(abs(self.deltas[i]), abs(self.deltas[i - 1]), abs(self.omegas[i]))
        return 3.0 * m * s * math.exp(3.0 * s)

    def snapshot(self, i: int, converged: bool, tail: float, tol: float) -> DeterminantSeries:
        return DeterminantSeries(
            params=self.params,
            deltas=tuple(self.deltas[: i + 1]),
            omegas=tuple(self.omegas[: i + 1]),
            increments=tuple(self.increments[: i + 1]),
            converged=converged,
            tail_estimate=tail,
            limit=self.deltas[i],
            tol=tol,
        )


def delta_series(params: MathieuParams, n_max: int = DEFAULT_N_MAX,
                 tol: float = DEFAULT_TOL) -> DeterminantSeries:
    """Iterate the ``nu = 0`` recursion until converged or ``n_max`` is hit.

    Convergence at order ``i`` requires both ``|Delta_i - Delta_{i-1}| < tol``
    and a tail estimate below ``tol * max(1, |Delta_i|)``; once the increment
    test passes, the tail is re-examined at geometrically spaced orders.  With ``tol <= 0``
    the series simply runs to ``n_max``.  An unconverged series is returned
    with ``converged=False``; :func:`delta_zero` turns that into an error.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    eng = DeltaRecursion(params)
    if n_max == 0:
        return eng.snapshot(0, False, eng.tail_estimate(0) if params.q == 0 else math.inf, tol)
    next_check = 1
    for i in range(1, n_max + 1):
        while eng.order < i:
            eng.step()
        if tol > 0 and i >= next_check and abs(eng.increments[i]) < tol:
            tail = eng.tail_estimate(i)
            if tail <= tol * max(1.0, abs(eng.deltas[i])):
                return eng.snapshot(i, True, tail, tol)
            # the bound decays like i^-3; re-testing every step is wasted work
            next_check = i + 1 + i // 64
    return eng.snapshot(n_max, False, eng.tail_estimate(n_max), tol)


def delta_zero(params: MathieuParams, tol: float = DEFAULT_TOL,
               n_max: int = DEFAULT_N_MAX) -> float:
    """Delta(a, 0), the infinite determinant entering the Whittaker-Hill formula."""
    series = delta_series(params, n_max=n_max, tol=tol)
    if not series.converged:
        raise NoConvergence(n_max)
    return series.limit


def minor_recursion(params: MathieuParams, n: int) -> tuple[list, list]:
    """Delta_i and Omega_i for ``i <= n`` from the paired two-term recursions.

    ``Omega_i = Delta_{i-1} - alpha_i Omega_{i-1}`` and
    ``Delta_i = Delta_{i-1} - 2 alpha_i Omega_{i-1} + alpha_i^2 Delta_{i-2}``
    started from ``Delta_0 = Omega_0 = 1`` and ``Delta_{-1} = 0``.  This is
    the minor-expansion route, independent of the third-order form.
    """
    deltas = [1.0]
    omegas = [1.0]
    prev2 = 0.0
    for i in range(1, n + 1):
        a_i = alpha(i, params)
        d = deltas[-1] - 2.0 * a_i * omegas[-1] + a_i * a_i * prev2
        prev2 = deltas[-1]
        omegas.append(deltas[-1] - a_i * omegas[-1])
        deltas.append(d)
    return deltas, omegas
