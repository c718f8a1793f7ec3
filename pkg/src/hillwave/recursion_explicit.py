"""Explicit solution of third-order linear recursions with variable coefficients.

For ``u_i = a_i u_{i-1} + b_i u_{i-2} + c_i u_{i-3}`` (all ``b_i != 0``) the
value ``u_k`` is rewritten, step by step, as a sum over earlier terms:

* A *sum form* of span ``n`` expresses ``u_k`` through ``u_{k-1} ..
  u_{k-n+2}`` and ``u_{k-n}``; the coefficient of ``u_{k-n+1}`` is zero.
  :func:`extend_sum` lengthens the span by one, trading ``u_{k-n}`` for
  lower terms via the recursion written at index ``k-n+2``.  Span 3 is the
  recursion itself.
* The *elimination* stage then removes ``u_{k-1}, u_{k-2}, ...`` one at a
  time, each time substituting the sum form anchored at the eliminated
  index whose lowest term is again ``u_{k-n}``.  After ``n-4``
  eliminations only ``u_{k-n+3}, u_{k-n+2}`` and ``u_{k-n}`` survive, which
  gives ``u_k`` explicitly from three seeds.
* The coefficient eliminated at each stage is a sum over increasing index
  chains ("jump sequences") of products of sum-form coefficients, which
  yields a closed form (:func:`p_sum`, ``gamma_coeffs(method="jumps")``).

Coefficients are addressed by the offset ``j`` of the term ``u_{k-j}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .coefficients import MathieuParams, alpha
from .errors import DegenerateB, IndexOutOfValidity
from .hill_determinant import build_truncated, delta_series, det_direct

EPS_B = 1e-12
MIN_SPAN = 4
MAX_JUMP_LENGTH = 24


@dataclass(frozen=True)
class RecursionSystem:
    """Coefficient sequences of ``u_i = a_i u_{i-1} + b_i u_{i-2} + c_i u_{i-3}``.

    ``start`` is the lowest index at which the recursion holds (three seeds
    ``u_{start-3} .. u_{start-1}`` precede it).  Sequences are indexed by
    absolute index, so entries below ``start`` are never read.
    """

    a_seq: Sequence[float]
    b_seq: Sequence[float]
    c_seq: Sequence[float]
    start: int = 3
    eps_b: float = EPS_B

    def __post_init__(self):
        if not (len(self.a_seq) == len(self.b_seq) == len(self.c_seq)):
            raise ValueError("coefficient sequences must have equal length")

    @property
    def last(self) -> int:
        return len(self.a_seq) - 1

    def _check(self, i: int) -> None:
        if i < self.start or i > self.last:
            raise IndexOutOfValidity(
                f"recursion index {i} outside [{self.start}, {self.last}]", index=i)

    def a(self, i: int) -> float:
        self._check(i)
        return self.a_seq[i]

    def b(self, i: int) -> float:
        self._check(i)
        v = self.b_seq[i]
        if abs(v) < self.eps_b:
            raise DegenerateB(i, v)
        return v

    def c(self, i: int) -> float:
        self._check(i)
        return self.c_seq[i]


def random_system(rng, last: int, start: int = 3, spread: float = 2.0,
                  b_floor: float = 0.1) -> RecursionSystem:
    """Coefficients uniform in [-spread, spread] with ``|b_i| >= b_floor``.

    ``rng`` is a :class:`numpy.random.Generator`; the draws are taken in
    the fixed order a, |b|, sign(b), c so that a seed pins the system.
    """
    size = last + 1
    a = rng.uniform(-spread, spread, size)
    b = rng.uniform(b_floor, spread, size) * rng.choice([-1.0, 1.0], size)
    c = rng.uniform(-spread, spread, size)
    return RecursionSystem(tuple(a.tolist()), tuple(b.tolist()), tuple(c.tolist()), start=start)


def direct_iterate(sys: RecursionSystem, u0: float, u1: float, u2: float, k: int) -> float:
    """``u_k`` by literal iteration, seeds placed at ``start-3 .. start-1``."""
    return trajectory(sys, u0, u1, u2, k)[k]


def trajectory(sys: RecursionSystem, u0: float, u1: float, u2: float, k: int) -> dict[int, float]:
    s = sys.start
    if k < s:
        raise IndexOutOfValidity(f"k={k} must be >= {s}", k=k)
    u = {s - 3: u0, s - 2: u1, s - 1: u2}
    for i in range(s, k + 1):
        u[i] = sys.a_seq[i] * u[i - 1] + sys.b_seq[i] * u[i - 2] + sys.c_seq[i] * u[i - 3]
    return u


@dataclass(frozen=True)
class SumForm:
    """``u_k = sum_j g[j] u_{k-j} + G u_{k-n}`` with ``j`` in ``1..n-2``.

    The span-3 form is the recursion itself and carries ``g = {1: a_k,
    2: b_k}``; from span 4 on the offset ``n-1`` is absent.
    """

    k: int
    n: int
    g: Mapping[int, float]
    G: float

    def evaluate(self, u: Mapping[int, float]) -> float:
        total = math.fsum(coef * u[self.k - j] for j, coef in self.g.items())
        return total + self.G * u[self.k - self.n]


def initial_form(sys: RecursionSystem, k: int) -> SumForm:
    return SumForm(k=k, n=3, g={1: sys.a(k), 2: sys.b(k)}, G=sys.c(k))


def extend_sum(s: SumForm, sys: RecursionSystem) -> SumForm:
    """Replace ``u_{k-n}`` using the recursion at index ``k-n+2``."""
    idx = s.k - s.n + 2
    b = sys.b(idx)
    g = dict(s.g)
    g[s.n - 2] = g.get(s.n - 2, 0.0) + s.G / b
    g[s.n - 1] = g.get(s.n - 1, 0.0) - s.G * sys.a(idx) / b
    return SumForm(k=s.k, n=s.n + 1, g=g, G=-s.G * sys.c(idx) / b)


def sum_form(sys: RecursionSystem, k: int, n: int) -> SumForm:
    if n < 3:
        raise IndexOutOfValidity(f"span must be >= 3, got {n}", n=n)
    s = initial_form(sys, k)
    while s.n < n:
        s = extend_sum(s, sys)
    return s


def _form_lists(sys: RecursionSystem, k: int, n: int) -> tuple[list, float]:
    """Span-``n`` form as a list indexed by offset (slot 0 unused).

    Same arithmetic as repeated :func:`extend_sum`, done in place.
    """
    g = [0.0] * (n + 1)
    g[1] = sys.a(k)
    g[2] = sys.b(k)
    G = sys.c(k)
    for m in range(3, n):
        idx = k - m + 2
        b = sys.b(idx)
        g[m - 2] += G / b
        g[m - 1] -= G * sys.a(idx) / b
        G = -G * sys.c(idx) / b
    return g, G


# -- closed forms -----------------------------------------------------------

def G_closed_form(n: int, k: int, sys: RecursionSystem) -> float:
    """``(-1)^(n-3) c_k prod_{r=1}^{n-3} c_{k-r} / b_{k-r}``."""
    if n < 3:
        raise IndexOutOfValidity(f"span must be >= 3, got {n}", n=n)
    value = sys.c(k)
    for r in range(1, n - 2):
        value *= sys.c(k - r) / sys.b(k - r)
    return -value if (n - 3) % 2 else value


def g_closed_form(n: int, k: int, j: int, sys: RecursionSystem) -> float:
    """Coefficient of ``u_{k-j}`` in the span-``n`` sum form.

    Each offset is touched by exactly two elimination steps: it first
    receives ``-G_{j+1} a_{k-j+1} / b_{k-j+1}`` (when ``n >= j+2``) and then
    ``G_{j+2} / b_{k-j}`` (when ``n >= j+3``); afterwards it is frozen.
    Offsets 1 and 2 additionally start from ``a_k`` and ``b_k``.
    """
    if n < 3:
        raise IndexOutOfValidity(f"span must be >= 3, got {n}", n=n)
    upper = 2 if n == 3 else n - 2
    if not 1 <= j <= upper:
        raise IndexOutOfValidity(f"offset j={j} outside 1..{upper} for span {n}", n=n, j=j)
    value = {1: sys.a(k), 2: sys.b(k)}.get(j, 0.0)
    if j >= 2 and n >= j + 2:
        idx = k - j + 1
        value -= G_closed_form(j + 1, k, sys) * sys.a(idx) / sys.b(idx)
    if n >= j + 3:
        value += G_closed_form(j + 2, k, sys) / sys.b(k - j)
    return value


# -- jump sequences ---------------------------------------------------------

@dataclass(frozen=True)
class JumpSequence:
    """Strictly increasing chain ``(0, v1)(v1, v2) ... (v_{p-1}, ell)``."""

    pairs: tuple

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a jump sequence needs at least one jump")
        if self.pairs[0][0] != 0:
            raise ValueError("jump sequences start at 0")
        for (m1, n1), (m2, _) in zip(self.pairs, self.pairs[1:]):
            if n1 != m2:
                raise ValueError("consecutive jumps must share their endpoint")
        if any(mu >= nu for mu, nu in self.pairs):
            raise ValueError("jumps must be strictly increasing")

    @property
    def end(self) -> int:
        return self.pairs[-1][1]

    def __len__(self) -> int:
        return len(self.pairs)


@lru_cache(maxsize=None)
def _jumps(ell: int, p: int) -> tuple:
    out = []
    for inner in itertools.combinations(range(1, ell), p - 1):
        pts = (0,) + inner + (ell,)
        out.append(JumpSequence(tuple(zip(pts[:-1], pts[1:]))))
    return tuple(out)


def enumerate_jumps(ell: int, p: int) -> list[JumpSequence]:
    """All chains from 0 to ``ell`` with exactly ``p`` jumps, lexicographic."""
    if ell < 1 or not 1 <= p <= ell:
        raise ValueError(f"need 1 <= p <= ell, got ell={ell}, p={p}")
    if ell > MAX_JUMP_LENGTH:
        raise ValueError(f"jump enumeration is capped at ell={MAX_JUMP_LENGTH}")
    return list(_jumps(ell, p))


CoefficientFn = Callable[[int, int, int], float]


def _closed_provider(sys: RecursionSystem) -> CoefficientFn:
    cache: dict = {}

    def coef(span: int, anchor: int, j: int) -> float:
        key = (span, anchor, j)
        if key not in cache:
            cache[key] = g_closed_form(span, anchor, j, sys)
        return cache[key]

    return coef


def p_sum(ell: int, p: int, n: int, k: int, sys: RecursionSystem,
          coef: CoefficientFn | None = None) -> float:
    """Sum over ``p``-jump chains ``0 -> ell`` of ``prod g_{n-mu}^{k-mu}[nu-mu]``."""
    coef = coef or _closed_provider(sys)
    total = []
    for seq in enumerate_jumps(ell, p):
        prod = 1.0
        for mu, nu in seq.pairs:
            prod *= coef(n - mu, k - mu, nu - mu)
        total.append(prod)
    return math.fsum(total)


def chain_sum(ell: int, n: int, k: int, sys: RecursionSystem,
              coef: CoefficientFn | None = None) -> float:
    """Coefficient removed by the ``ell``-th elimination: all chains to ``ell``."""
    coef = coef or _closed_provider(sys)
    return math.fsum(p_sum(ell, p, n, k, sys, coef) for p in range(1, ell + 1))


# -- elimination ------------------------------------------------------------

def _check_elimination(n: int, k: int, ell: int, sys: RecursionSystem) -> None:
    if n < MIN_SPAN:
        raise IndexOutOfValidity(f"span n={n} must be >= {MIN_SPAN}", n=n)
    if not 0 <= ell <= n - 4:
        raise IndexOutOfValidity(f"ell={ell} outside 0..{n - 4}", ell=ell, n=n)
    lowest = k - n + 3
    if lowest < sys.start or k > sys.last:
        raise IndexOutOfValidity(
            f"(k={k}, n={n}) needs recursion indices {lowest}..{k}, "
            f"system provides {sys.start}..{sys.last}", k=k, n=n)


def gamma_coeffs(n: int, k: int, ell: int, sys: RecursionSystem,
                 method: str = "elimination") -> tuple[dict[int, float], float]:
    """Coefficients of ``u_k`` after ``ell`` eliminations.

    Returns ``(gamma, Gamma)`` with ``gamma[j]`` the coefficient of
    ``u_{k-j}`` for ``j = ell+1 .. n-2`` and ``Gamma`` that of ``u_{k-n}``.

    ``method="elimination"`` applies the first-order updates one step at a
    time on sum forms built by :func:`extend_sum` arithmetic.
    ``method="jumps"`` assembles the same numbers from closed-form
    sum-form coefficients and chain sums; its cost grows like ``2^ell``.
    """
    _check_elimination(n, k, ell, sys)
    if method == "elimination":
        g, G = _form_lists(sys, k, n)
        gamma = {j: g[j] for j in range(1, n - 1)}
        Gamma = G
        for sigma in range(ell):
            h = gamma.pop(sigma + 1)
            fg, fG = _form_lists(sys, k - sigma - 1, n - sigma - 1)
            for jj in range(1, n - sigma - 2):
                gamma[jj + sigma + 1] += h * fg[jj]
            Gamma += h * fG
        return gamma, Gamma
    if method == "jumps":
        coef = _closed_provider(sys)
        heads = [chain_sum(s, n, k, sys, coef) for s in range(1, ell + 1)]
        gamma = {}
        for j in range(ell + 1, n - 1):
            terms = [coef(n, k, j)]
            terms += [heads[sigma] * coef(n - sigma - 1, k - sigma - 1, j - sigma - 1)
                      for sigma in range(ell)]
            gamma[j] = math.fsum(terms)
        Gamma = math.fsum([G_closed_form(n, k, sys)] +
                          [heads[sigma] * G_closed_form(n - sigma - 1, k - sigma - 1, sys)
                           for sigma in range(ell)])
        return gamma, Gamma
    raise ValueError(f"unknown method {method!r}")


def three_term_coeffs(sys: RecursionSystem, k: int, n: int,
                      method: str = "elimination") -> tuple[float, float, float]:
    """Weights of ``u_{k-(n-3)}, u_{k-(n-2)}, u_{k-n}`` in the final form."""
    gamma, Gamma = gamma_coeffs(n, k, n - 4, sys, method=method)
    return gamma[n - 3], gamma[n - 2], Gamma


def solve_uk(sys: RecursionSystem, u_k_n3: float, u_k_n2: float, u_k_n: float,
             k: int, n: int, method: str = "elimination") -> float:
    """``u_k`` from the seeds ``u_{k-(n-3)}``, ``u_{k-(n-2)}`` and ``u_{k-n}``."""
    w3, w2, w0 = three_term_coeffs(sys, k, n, method=method)
    return w3 * u_k_n3 + w2 * u_k_n2 + w0 * u_k_n


# -- application to the Hill determinant ------------------------------------

def delta_system(params: MathieuParams, k: int) -> RecursionSystem:
    """``(a_i, b_i, c_i) = (beta_i, -alpha_i beta_i, alpha_i alpha_{i-1}^2)``, ``i <= k``."""
    al = [0.0] + [alpha(i, params) for i in range(1, k + 1)]
    a_seq = [0.0] + [1.0 - al[i] for i in range(1, k + 1)]
    b_seq = [0.0] + [-al[i] * (1.0 - al[i]) for i in range(1, k + 1)]
    c_seq = [0.0, 0.0] + [al[i] * al[i - 1] ** 2 for i in range(2, k + 1)]
    return RecursionSystem(a_seq, b_seq, c_seq, start=3)


def delta_explicit(params: MathieuParams, k: int, n: int | None = None,
                   method: str = "elimination") -> float:
    """``Delta_k(a, 0)`` through the three-seed explicit form.

    ``n`` defaults to ``k``, whose seeds ``Delta_0, Delta_2, Delta_3`` come
    from direct determinants; smaller spans take their seeds from
    :func:`~hillwave.hill_determinant.delta_series`.  The form is
    undefined when any ``beta_i``, ``1 <= i <= k``, vanishes (``b_i`` is then
    zero), which raises :class:`DegenerateB`.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if params.q == 0:
        return 1.0
    sys = delta_system(params, max(k, 3))
    for i in range(1, k + 1):
        if abs(sys.b_seq[i]) < sys.eps_b:
            raise DegenerateB(i, sys.b_seq[i])
    seeds = [det_direct(build_truncated(i, 0.0, params)) for i in range(4)]
    if k <= 3:
        return seeds[k]
    n = k if n is None else n
    if not MIN_SPAN <= n <= k:
        raise IndexOutOfValidity(f"span n={n} must lie in {MIN_SPAN}..{k}", n=n, k=k)
    lo = k - n
    if lo > 0:
        seeds = list(delta_series(params, n_max=lo + 3, tol=0.0).deltas)
    return solve_uk(sys, seeds[lo + 3], seeds[lo + 2], seeds[lo], k, n, method=method)
