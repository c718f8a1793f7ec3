"""Fourier coefficients of a Floquet solution and their quality checks.

With ``psi(z) = exp(i nu z) sum_k c_k exp(2 i k z)`` the Mathieu equation
becomes the three-term system

    ((2k + nu)^2 - a) c_k + q (c_{k+1} + c_{k-1}) = 0.

The coefficients of a solution pair ``(nu, a)`` are the null vector of the
truncated tridiagonal matrix, found here by inverse iteration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .coefficients import CharacteristicExponent, MathieuParams, Stability
from .errors import NearPole, NotNearSingular
from .floquet_oracle import propagate

DEFAULT_ORDER = 32
MAX_ORDER = 512
DECAY_RATIO = 1e-8
DIRECTION_TOL = 1e-12
RESIDUAL_LIMIT = 1e-6
TIE_TOL = 1e-12
MAX_ITER = 100
MIN_GRID = 16


@dataclass(frozen=True)
class FourierCoefficients:
    """Unit-norm coefficients ``c_k`` for ``k = -order .. order``."""

    order: int
    coeffs: np.ndarray
    nu: CharacteristicExponent
    band_edge: bool = False
    matrix_residual: float = 0.0
    iterations: int = 0

    @property
    def kappas(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def coefficient(self, kappa: int) -> complex:
        return complex(self.coeffs[kappa + self.order])

    @property
    def boundary_ratio(self) -> float:
        peak = np.max(np.abs(self.coeffs))
        edge = max(abs(self.coeffs[0]), abs(self.coeffs[-1]))
        return float(edge / peak)

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "kappa": self.kappas.tolist(),
            "re": [float(c.real) for c in self.coeffs],
            "im": [float(c.imag) for c in self.coeffs],
            "nu": self.nu.as_dict(),
            "band_edge": self.band_edge,
        }


def hill_matrix(nu: complex, params: MathieuParams, n: int) -> np.ndarray:
    """Dense ``(2n+1)``-square truncation; row ``r`` is ``k = r - n``."""
    k = np.arange(-n, n + 1)
    diag = (2 * k + nu) ** 2 - params.a
    m = np.diag(diag.astype(complex))
    idx = np.arange(2 * n)
    m[idx, idx + 1] = params.q
    m[idx + 1, idx] = params.q
    return m


def recurrence_residuals(fc: FourierCoefficients, params: MathieuParams) -> np.ndarray:
    """Row defects of the three-term system at interior indices."""
    c = fc.coeffs
    k = fc.kappas[1:-1]
    d = (2 * k + fc.nu.value) ** 2 - params.a
    return np.abs(d * c[1:-1] + params.q * (c[2:] + c[:-2]))


def propagate_coefficients(c_prev: complex, c_cur: complex, kappa: int, nu: complex,
                           params: MathieuParams, steps: int) -> list[complex]:
    """Run the three-term system upward from ``(c_{kappa-1}, c_kappa)``."""
    if params.q == 0:
        raise ValueError("forward propagation needs q != 0")
    out = [c_prev, c_cur]
    for j in range(kappa, kappa + steps):
        d = (2 * j + nu) ** 2 - params.a
        out.append(-(d * out[-1]) / params.q - out[-2])
    return out


def _normalize(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    mags = np.abs(v)
    top = int(np.flatnonzero(mags >= mags.max() - TIE_TOL)[0])
    v = v * (abs(v[top]) / v[top])
    v[top] = abs(v[top])
    return v


def _check_poles(nu: complex, params: MathieuParams, n: int, eps: float = 1e-9) -> None:
    if params.q == 0:
        return
    for kappa in range(-n, n + 1):
        denom = (2 * kappa + nu) ** 2 - params.a
        if abs(denom) <= eps:
            raise NearPole(kappa, denom)


def _null_vector(m: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    dim = m.shape[0]
    scale = max(1.0, float(np.max(np.abs(m))))
    shift = 0.0
    for _ in range(3):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            lu = lu_factor(m - shift * np.eye(dim), check_finite=False)
        if np.all(np.abs(np.diag(lu[0])) > 0):
            break
        # exactly singular: a perturbation at rounding level keeps the direction
        shift = (shift * 16) or 64 * np.finfo(float).eps * scale
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x = _normalize(x)
    for it in range(1, MAX_ITER + 1):
        y = lu_solve(lu, x, check_finite=False)
        if not np.all(np.isfinite(y)):
            raise NotNearSingular("inverse iteration overflowed")
        y = _normalize(y)
        if np.linalg.norm(y - x) <= DIRECTION_TOL:
            return y, it
        x = y
    return x, MAX_ITER


def solve_coefficients(nu: CharacteristicExponent, params: MathieuParams,
                       n: int = DEFAULT_ORDER, seed: int = 0,
                       auto_size: bool = True) -> FourierCoefficients:
    """Null vector of the truncated system for the pair ``(nu, a)``.

    The order starts at ``n`` and doubles (up to 512) while the boundary
    coefficients exceed ``1e-8`` of the largest one.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    rng = np.random.default_rng(seed)
    order = n
    while True:
        _check_poles(nu.value, params, order)
        m = hill_matrix(nu.value, params, order)
        c, its = _null_vector(m, rng)
        res = float(np.linalg.norm(m @ c))
        fc = FourierCoefficients(order, c, nu, nu.re in (0.0, 1.0), res, its)
        if not auto_size or fc.boundary_ratio <= DECAY_RATIO or order >= MAX_ORDER:
            break
        order = min(2 * order, MAX_ORDER)
    if res > RESIDUAL_LIMIT:
        raise NotNearSingular(
            f"|A c| = {res:.3e} exceeds {RESIDUAL_LIMIT:g}; (nu, a) is not a solution pair",
            residual=res, order=order)
    return fc


def _phases(fc: FourierCoefficients, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = 2 * fc.kappas + fc.nu.value
    return w, np.exp(1j * np.outer(np.atleast_1d(z), w))


def synthesize(fc: FourierCoefficients, z):
    """psi(z); scalar in, scalar out."""
    _, e = _phases(fc, np.asarray(z, dtype=float))
    out = e @ fc.coeffs
    return complex(out[0]) if np.ndim(z) == 0 else out


def synthesize_derivative(fc: FourierCoefficients, z, order: int = 1):
    w, e = _phases(fc, np.asarray(z, dtype=float))
    out = e @ (fc.coeffs * (1j * w) ** order)
    return complex(out[0]) if np.ndim(z) == 0 else out


def _grid(grid: int) -> np.ndarray:
    if grid < MIN_GRID:
        raise ValueError(f"grid must be >= {MIN_GRID}")
    return np.linspace(0.0, math.pi, grid)


def residual(fc: FourierCoefficients, params: MathieuParams, grid: int = 64) -> float:
    """max |psi'' + (a - 2q cos 2z) psi| over ``grid`` points of [0, pi]."""
    z = _grid(grid)
    psi = synthesize(fc, z)
    d2 = synthesize_derivative(fc, z, 2)
    return float(np.max(np.abs(d2 + (params.a - 2 * params.q * np.cos(2 * z)) * psi)))


def floquet_defect(fc: FourierCoefficients, grid: int = 64) -> float:
    """max |psi(z + pi) - exp(i nu pi) psi(z)| from the Fourier form."""
    z = _grid(grid)
    eps = np.exp(1j * math.pi * fc.nu.value)
    return float(np.max(np.abs(synthesize(fc, z + math.pi) - eps * synthesize(fc, z))))


def ode_floquet_defect(fc: FourierCoefficients, params: MathieuParams, grid: int = 64,
                       rtol: float = 1e-12, atol: float = 1e-14) -> float:
    """Floquet defect of the ODE solution started from the synthesized data.

    ``(psi(0), psi'(0))`` is integrated to ``2 pi`` and compared with
    ``exp(i nu pi) psi(z)`` one period earlier.
    """
    z = _grid(grid)
    full = np.concatenate([z, z[1:] + math.pi])
    psi_ode, _ = propagate(params, synthesize(fc, 0.0), synthesize_derivative(fc, 0.0), full,
                           rtol=rtol, atol=atol)
    eps = np.exp(1j * math.pi * fc.nu.value)
    first, second = psi_ode[: len(z)], psi_ode[len(z) - 1:]
    return float(np.max(np.abs(second - eps * first)))


def ode_mismatch(fc: FourierCoefficients, params: MathieuParams, grid: int = 64,
                 rtol: float = 1e-12, atol: float = 1e-14) -> float:
    """max |psi_fourier - psi_ode| on [0, pi]."""
    z = _grid(grid)
    psi_ode, _ = propagate(params, synthesize(fc, 0.0), synthesize_derivative(fc, 0.0), z,
                           rtol=rtol, atol=atol)
    return float(np.max(np.abs(psi_ode - synthesize(fc, z))))


def free_exponent(a: float) -> CharacteristicExponent:
    """Exponent ``sqrt(a)`` of the free equation reduced to the canonical strip."""
    if a < 0:
        return CharacteristicExponent(0.0, math.sqrt(-a), Stability.UNSTABLE_GAP)
    r = math.fmod(math.sqrt(a), 2.0)
    return CharacteristicExponent(r if r <= 1.0 else 2.0 - r, 0.0, Stability.STABLE)
