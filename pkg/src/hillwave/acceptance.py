"""End-to-end acceptance checks shared by ``hillwave verify`` and the tests.

Each ``criterion_*`` function runs one check at its fixed tolerance and
returns a :class:`CriterionResult`; nothing here is tuned per run.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .coefficients import MathieuParams, Stability, alpha
from .floquet_oracle import band_edges_mu, discriminant_mu, exponent_from_mu, integrate_fundamental
from .fourier_solution import (floquet_defect, free_exponent, ode_floquet_defect,
                               recurrence_residuals, residual, solve_coefficients)
from .hill_determinant import DeltaRecursion, delta_general, delta_series, delta_zero
from .recursion_explicit import (delta_explicit, enumerate_jumps, extend_sum, initial_form,
                                 random_system, solve_uk, trajectory)
from .whittaker_hill import band_edges, band_scan, s_factor, solve_exponent, wh_rhs

FREE_A = (0.25, 0.5, 2.3, -1.0, -4.0)
GRID_A = (-2.0, -0.5, 0.7, 1.0, 2.5, 5.3, 9.7)
GRID_Q = (0.5, 1.0, 2.0)
ODE_RTOL, ODE_ATOL = 1e-10, 1e-12

# index pairs of the ell = 6, p = 4 chains, in the order they are tabulated
REFERENCE_JUMPS_6_4 = (
    ((0, 1), (1, 2), (2, 3), (3, 6)),
    ((0, 1), (1, 2), (2, 4), (4, 6)),
    ((0, 1), (1, 2), (2, 5), (5, 6)),
    ((0, 1), (1, 3), (3, 4), (4, 6)),
    ((0, 1), (1, 3), (3, 5), (5, 6)),
    ((0, 1), (1, 4), (4, 5), (5, 6)),
    ((0, 2), (2, 3), (3, 4), (4, 6)),
    ((0, 2), (2, 3), (3, 5), (5, 6)),
    ((0, 2), (2, 4), (4, 5), (5, 6)),
    ((0, 3), (3, 4), (4, 5), (5, 6)),
)


@dataclass
class CriterionResult:
    ident: str
    title: str
    passed: bool
    tolerance: float
    worst: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.ident}: {self.title} "
                f"(worst {self.worst:.3e}, tol {self.tolerance:.0e}, {self.seconds:.1f}s)")

    def as_dict(self) -> dict:
        return asdict(self)


def _result(ident, title, tol, worst, **detail) -> CriterionResult:
    return CriterionResult(ident, title, bool(worst <= tol), tol, float(worst), detail)


def _grid():
    return [MathieuParams(a, q) for a in GRID_A for q in GRID_Q]


def _rel(x: float, y: float) -> float:
    return abs(x - y) / max(1.0, abs(y))


def criterion_1() -> CriterionResult:
    """Free case: Delta = 1, formula and ODE exponents equal sqrt(a) folded."""
    worst_delta = worst_wh = worst_ode = 0.0
    for a in FREE_A:
        p = MathieuParams(a, 0.0)
        ref = free_exponent(a).value
        worst_delta = max(worst_delta, abs(delta_zero(p) - 1.0))
        worst_wh = max(worst_wh, abs(solve_exponent(p).value - ref))
        worst_ode = max(worst_ode, abs(exponent_from_mu(p, ODE_RTOL, ODE_ATOL).value - ref))
    passed = worst_delta == 0.0 and worst_wh <= 1e-12 and worst_ode <= 1e-10
    r = CriterionResult("1", "free-case exactness", passed, 1e-12,
                        max(worst_delta, worst_wh),
                        {"delta_minus_one": worst_delta, "formula_exponent": worst_wh,
                         "ode_exponent": worst_ode, "ode_tol": 1e-10})
    return r


def criterion_2a(n_max: int = 40) -> CriterionResult:
    """direct, recursion and explicit truncations agree for n <= 40."""
    worst = 0.0
    for p in _grid():
        series = delta_series(p, n_max=n_max, tol=0.0).deltas
        for n in range(n_max + 1):
            d = delta_general(p, 0.0, n)
            e = delta_explicit(p, n)
            r = series[n]
            worst = max(worst, _rel(d, r), _rel(e, r), _rel(d, e))
    return _result("2a", "determinant triple agreement, n <= 40", 1e-9, worst, points=len(_grid()))


def criterion_2b(n_ref: int = 60) -> CriterionResult:
    """Converged Delta(0) against the fixed truncation n = 60."""
    worst, where = 0.0, None
    for p in _grid():
        diff = abs(delta_zero(p) - delta_general(p, 0.0, n_ref))
        if diff > worst:
            worst, where = diff, p.as_dict()
    return _result("2b", f"delta_zero vs det_direct(n={n_ref})", 1e-10, worst, worst_at=where)


def criterion_3() -> CriterionResult:
    worst = 0.0
    for p in _grid():
        lhs = 1.0 - 2.0 * delta_zero(p) * s_factor(p.a)
        worst = max(worst, abs(lhs - discriminant_mu(p, ODE_RTOL, ODE_ATOL)))
    return _result("3", "formula vs ODE discriminant", 1e-6, worst)


def criterion_4() -> CriterionResult:
    """|W(pi) - 1| on a 5 x 5 grid of |a| <= 20, |q| <= 5."""
    worst = worst_rel = 0.0
    where = None
    for a in np.linspace(-20.0, 20.0, 5):
        for q in np.linspace(-5.0, 5.0, 5):
            fp = integrate_fundamental(MathieuParams(float(a), float(q)), ODE_RTOL, ODE_ATOL)
            err = abs(fp.wronskian - 1.0)
            worst_rel = max(worst_rel, fp.wronskian_defect)
            if err > worst:
                worst, where = err, {"a": float(a), "q": float(q)}
    return _result("4", "Wronskian conservation", 1e-9, worst, worst_at=where,
                   relative_defect=worst_rel)


def criterion_5(systems: int = 200, trajectories: int = 50, seed: int = 20240611) -> CriterionResult:
    rng = np.random.default_rng(seed)
    last = 30
    worst = 0.0
    solves = 0
    for _ in range(systems):
        sys = random_system(rng, last)
        seeds = rng.uniform(-1.0, 1.0, 3)
        u = trajectory(sys, *seeds, last)
        for k in range(10, last + 1):
            for n in range(7, k - 2):
                got = solve_uk(sys, u[k - n + 3], u[k - n + 2], u[k - n], k, n)
                worst = max(worst, abs(got - u[k]) / (abs(u[k]) or 1.0))
                solves += 1
    worst_form = 0.0
    for _ in range(trajectories):
        sys = random_system(rng, last)
        u = trajectory(sys, *rng.uniform(-1.0, 1.0, 3), last)
        form = initial_form(sys, last)
        while True:
            worst_form = max(worst_form, abs(form.evaluate(u) - u[last]) / (abs(u[last]) or 1.0))
            if last - form.n + 2 < sys.start:
                break
            form = extend_sum(form, sys)
    worst_all = max(worst, worst_form)
    return _result("5", "explicit recursion solver vs iteration", 1e-9, worst_all,
                   solves=solves, solve_rel_error=worst, sum_form_rel_error=worst_form)


def criterion_6() -> CriterionResult:
    bad_counts = []
    for ell in range(1, 13):
        for p in range(1, ell + 1):
            if len(enumerate_jumps(ell, p)) != math.comb(ell - 1, p - 1):
                bad_counts.append((ell, p))
    listed = tuple(tuple(s.pairs) for s in enumerate_jumps(6, 4))
    ok = not bad_counts and listed == REFERENCE_JUMPS_6_4
    return CriterionResult("6", "jump sequence enumeration", ok, 0.0, 0.0 if ok else 1.0,
                           {"count_mismatches": bad_counts,
                            "table_matches": listed == REFERENCE_JUMPS_6_4})


def stable_sample(per_q: int = 5, qs=(0.5, 1.0), a_range=(-1.0, 10.0), steps: int = 200) -> list:
    """Evenly spread stable points with exponent inside (0.05, 0.95)."""
    picked = []
    for q in qs:
        pts = [b for b in band_scan(q, a_range[0], a_range[1], steps)
               if not b.flag and b.nu.stability is Stability.STABLE and 0.05 < b.nu.re < 0.95]
        idx = np.linspace(0, len(pts) - 1, per_q).round().astype(int)
        picked.extend((pts[i].a, q, pts[i].nu) for i in idx)
    return picked


def criterion_7(order: int = 32) -> CriterionResult:
    rec = ode = defect = four_defect = 0.0
    for a, q, nu in stable_sample():
        p = MathieuParams(a, q)
        fc = solve_coefficients(nu, p, n=order, auto_size=False)
        peak = float(np.max(np.abs(fc.coeffs)))
        rec = max(rec, float(recurrence_residuals(fc, p).max()) / (1e-10 * peak))
        ode = max(ode, residual(fc, p) / 1e-8)
        defect = max(defect, ode_floquet_defect(fc, p) / 1e-7)
        four_defect = max(four_defect, floquet_defect(fc))
    worst = max(rec, ode, defect)
    return _result("7", "Floquet solution quality at n = 32", 1.0, worst,
                   recurrence_ratio=rec, ode_residual_ratio=ode, floquet_defect_ratio=defect,
                   fourier_form_defect=four_defect, note="worst is the largest ratio to its own limit")


def criterion_8(q: float = 1.0, window=(-1.0, 10.0)) -> CriterionResult:
    wh = band_edges(q, window)
    ode = band_edges_mu(q, window, rtol=ODE_RTOL, atol=ODE_ATOL)
    if len(wh) != len(ode) or not wh:
        return CriterionResult("8", "band edges, formula vs ODE", False, 1e-6, math.inf,
                               {"formula": wh, "ode": ode})
    worst = max(abs(x - y) for x, y in zip(wh, ode))
    return _result("8", "band edges, formula vs ODE", 1e-6, worst, formula=wh, ode=ode)


def criterion_9(length: int = 2000, probe: int = 500) -> CriterionResult:
    """Monotone increments past the first small alpha, and O(1) extension."""
    violations = []
    for p in _grid():
        inc = delta_series(p, n_max=length, tol=0.0).increments
        i0 = next(i for i in range(1, length) if abs(alpha(i, p)) < 0.5)
        for i in range(i0 + 2, length + 1):
            if abs(inc[i]) > abs(inc[i - 1]):
                violations.append((p.a, p.q, i))
                break
    eng = DeltaRecursion(MathieuParams(1.0, 1.0))
    structural = True
    for _ in range(probe):
        before_xi, before_steps = eng.xi_evaluations, eng.steps_taken
        prefix = list(eng.deltas)
        eng.step()
        structural &= eng.xi_evaluations - before_xi == 1
        structural &= eng.steps_taken - before_steps == 1
        structural &= eng.deltas[:-1] == prefix
    ok = not violations and structural
    return CriterionResult("9", "monotone convergence and O(1) extension", ok, 0.0,
                           float(len(violations)),
                           {"monotonicity_violations": violations, "structural_o1": structural})


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    criterion_1, criterion_2a, criterion_2b, criterion_3, criterion_4,
    criterion_5, criterion_6, criterion_7, criterion_8, criterion_9,
)


def run_one(fn: Callable[[], CriterionResult]) -> CriterionResult:
    t0 = time.perf_counter()
    r = fn()
    r.seconds = time.perf_counter() - t0
    return r


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        r = run_one(fn)
        if echo is not None:
            echo(r.line())
        results.append(r)
    return results
