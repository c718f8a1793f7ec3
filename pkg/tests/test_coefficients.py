import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hillwave.coefficients import (EPS_POLE, CharacteristicExponent, MathieuParams, Stability,
                                   alpha, beta, tail_trace_bound, xi)
from hillwave.errors import NearPole

finite = st.floats(-50, 50, allow_nan=False)
nonres_a = st.floats(-30, 30).filter(lambda a: min(abs(a - 4 * k * k) for k in range(4)) > 1e-3)


class TestParams:
    def test_zero_q_accepted(self):
        assert MathieuParams(2.0, 0.0).q == 0.0

    @pytest.mark.parametrize("a,q", [(math.nan, 1.0), (1.0, math.inf)])
    def test_non_finite_rejected(self, a, q):
        with pytest.raises(ValueError):
            MathieuParams(a, q)


class TestExponentType:
    def test_stable_requires_zero_imaginary(self):
        with pytest.raises(ValueError):
            CharacteristicExponent(0.5, 0.1, Stability.STABLE)

    def test_gap_requires_edge_real_part(self):
        with pytest.raises(ValueError):
            CharacteristicExponent(0.5, 0.1, Stability.UNSTABLE_GAP)
        assert CharacteristicExponent(1.0, 0.3, Stability.UNSTABLE_GAP).value == 1 + 0.3j

    def test_band_edge_flag(self):
        assert CharacteristicExponent(0.0, 0.0, Stability.STABLE).is_band_edge
        assert not CharacteristicExponent(0.4, 0.0, Stability.STABLE).is_band_edge


class TestXi:
    def test_examples(self):
        assert xi(0, 0, MathieuParams(1, 1)) == -1.0
        assert xi(1, 0, MathieuParams(1, 2)) == pytest.approx(2 / 3, rel=1e-15)

    @given(st.integers(-50, 50), finite, finite)
    def test_free_case_vanishes(self, kappa, nu, a):
        assert xi(kappa, nu, MathieuParams(a, 0.0)) == 0.0

    def test_pole_raises(self):
        with pytest.raises(NearPole) as info:
            xi(1, 0.0, MathieuParams(4.0, 1.0))
        assert info.value.kappa == 1
        assert info.value.code == "NEAR_POLE"

    def test_pole_guard_width(self):
        xi(1, 0.0, MathieuParams(4.0 + 10 * EPS_POLE, 1.0))
        with pytest.raises(NearPole):
            xi(1, 0.0, MathieuParams(4.0 + 0.5 * EPS_POLE, 1.0))

    def test_complex_exponent(self):
        v = xi(1, 0.5j, MathieuParams(1.0, 1.0))
        assert isinstance(v, complex)
        assert v == pytest.approx(1.0 / ((2 - 0.5j) ** 2 - 1.0))

    @given(st.integers(-40, 40), nonres_a, st.floats(-5, 5))
    def test_symmetric_at_zero_exponent(self, kappa, a, q):
        p = MathieuParams(a, q)
        assert xi(-kappa, 0.0, p) == xi(kappa, 0.0, p)

    @given(st.integers(-30, 30), st.floats(0.05, 0.95), st.floats(-3, 3), st.floats(0.1, 3))
    def test_shift_by_two(self, kappa, nu, a, q):
        # (2 kappa - (nu + 2)) = (2 (kappa - 1) - nu)
        p = MathieuParams(a, q)
        assert xi(kappa, nu + 2.0, p) == pytest.approx(xi(kappa - 1, nu, p), rel=1e-12)

    def test_decay_is_quadratic(self):
        p = MathieuParams(7.3, 2.0)
        scaled = [abs(xi(k, 0.3, p)) * k * k for k in range(10, 20000, 97)]
        assert max(scaled) < 1.0
        assert scaled[-1] == pytest.approx(0.5, rel=1e-3)


class TestAlphaBeta:
    def test_examples(self):
        p = MathieuParams(1, 1)
        assert alpha(1, p) == pytest.approx(-1 / 3, rel=1e-15)
        assert alpha(2, p) == pytest.approx(1 / 45, rel=1e-15)
        assert beta(1, p) == pytest.approx(4 / 3, rel=1e-15)
        assert beta(2, p) == pytest.approx(44 / 45, rel=1e-15)

    @given(st.integers(1, 100), finite)
    def test_free_case(self, i, a):
        p = MathieuParams(a, 0.0)
        assert alpha(i, p) == 0.0 and beta(i, p) == 1.0

    def test_index_zero_rejected(self):
        with pytest.raises(ValueError):
            alpha(0, MathieuParams(1, 1))

    def test_limits(self):
        p = MathieuParams(3.1, 4.0)
        assert abs(alpha(5000, p)) < 1e-14
        assert beta(5000, p) == pytest.approx(1.0, abs=1e-14)


class TestTailBound:
    def test_free_case(self):
        assert tail_trace_bound(3, 0.0, MathieuParams(5.0, 0.0)).value == 0.0

    @given(st.integers(1, 200), st.floats(0, 0.99), nonres_a, st.floats(0.1, 5))
    def test_monotone_in_order(self, n, nu, a, q):
        p = MathieuParams(a, q)
        if any(abs((2 * k - nu) ** 2 - a) <= EPS_POLE for k in range(-n - 20, n + 20)):
            return
        assert tail_trace_bound(n + 1, nu, p).value <= tail_trace_bound(n, nu, p).value

    def test_against_partial_sum(self):
        p = MathieuParams(1.0, 1.0)
        kappas = range(11, 1_000_001)
        brute = math.fsum(2.0 / abs(4 * k * k - 1.0) for k in kappas)
        bound = tail_trace_bound(10, 0.0, p).value
        assert bound >= brute
        assert bound <= 1.01 * brute

    @pytest.mark.parametrize("n,nu,a,q", [(1, 0.0, 9.5, 2.0), (3, 0.7, -6.0, 1.5), (2, 0.3, 30.0, 4.0)])
    def test_is_upper_bound_close_to_resonance(self, n, nu, a, q):
        p = MathieuParams(a, q)
        brute = math.fsum(abs(xi(k, nu, p)) + abs(xi(-k, nu, p)) for k in range(n + 1, 200_001))
        assert tail_trace_bound(n, nu, p).value >= brute
