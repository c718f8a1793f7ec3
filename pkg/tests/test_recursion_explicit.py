import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hillwave.coefficients import MathieuParams
from hillwave.errors import DegenerateB, IndexOutOfValidity
from hillwave.hill_determinant import delta_series
from hillwave.recursion_explicit import (G_closed_form, JumpSequence, RecursionSystem, chain_sum,
                                         delta_explicit, direct_iterate, enumerate_jumps,
                                         extend_sum, g_closed_form, gamma_coeffs, initial_form,
                                         p_sum, random_system, solve_uk, sum_form,
                                         three_term_coeffs, trajectory)

GOLDEN_RANDOM_U12 = -27.575566646417453

seeds_st = st.integers(0, 2**32 - 1)


def constant(a, b, c, last=40):
    return RecursionSystem((a,) * (last + 1), (b,) * (last + 1), (c,) * (last + 1))


def system(seed, last=30):
    return random_system(np.random.default_rng(seed), last)


def rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


class TestDirectIterate:
    def test_tribonacci(self):
        s = constant(1.0, 1.0, 1.0)
        assert direct_iterate(s, 1, 1, 1, 3) == 3
        assert direct_iterate(s, 1, 1, 1, 6) == 17

    def test_second_order_reduction(self):
        s = constant(1.0, 1.0, 0.0)
        # 1, 1, 1, 2, 3, 5, 8
        assert direct_iterate(s, 1, 1, 1, 5) == 5
        assert direct_iterate(s, 1, 1, 1, 6) == 8

    def test_golden_random(self):
        s = random_system(np.random.default_rng(7), 12)
        assert direct_iterate(s, 0.3, -0.2, 0.5, 12) == GOLDEN_RANDOM_U12
        u = [0.3, -0.2, 0.5]
        for i in range(3, 13):
            u.append(s.a_seq[i] * u[-1] + s.b_seq[i] * u[-2] + s.c_seq[i] * u[-3])
        assert u[12] == GOLDEN_RANDOM_U12

    def test_rejects_index_below_start(self):
        with pytest.raises(IndexOutOfValidity):
            direct_iterate(constant(1, 1, 1), 1, 1, 1, 2)


class TestSystem:
    def test_degenerate_b(self):
        s = RecursionSystem((1.0,) * 6, (1.0, 1.0, 1.0, 1.0, 1e-13, 1.0), (1.0,) * 6)
        with pytest.raises(DegenerateB) as info:
            s.b(4)
        assert info.value.index == 4

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfValidity):
            constant(1, 1, 1, last=5).a(6)

    def test_unequal_lengths(self):
        with pytest.raises(ValueError):
            RecursionSystem((1.0,), (1.0, 2.0), (1.0,))

    @given(seeds_st)
    def test_random_system_respects_floor(self, seed):
        s = system(seed)
        assert min(abs(b) for b in s.b_seq) >= 0.1
        assert max(abs(x) for x in s.a_seq + s.c_seq) <= 2.0


class TestSumForm:
    def test_first_extension(self):
        s = system(3)
        k = 20
        f = extend_sum(initial_form(s, k), s)
        assert f.n == 4
        assert f.g[1] == pytest.approx(s.a(k) + s.c(k) / s.b(k - 1), rel=1e-15)

    @given(seeds_st, st.integers(12, 30))
    def test_invariant_after_every_extension(self, seed, k):
        rng = np.random.default_rng(seed)
        s = random_system(rng, 30)
        u = trajectory(s, *rng.uniform(-1, 1, 3), 30)
        f = initial_form(s, k)
        while True:
            assert rel(f.evaluate(u), u[k]) <= 1e-9
            if k - f.n + 2 < s.start:
                break
            f = extend_sum(f, s)

    def test_long_extension_matches_iteration(self):
        s = system(11)
        u = trajectory(s, 0.1, 0.7, -0.4, 30)
        f = sum_form(s, 30, 20)
        assert rel(f.evaluate(u), u[30]) <= 1e-12

    def test_span_below_three_rejected(self):
        with pytest.raises(IndexOutOfValidity):
            sum_form(system(0), 10, 2)


class TestClosedForms:
    @pytest.mark.parametrize("seed", range(5))
    def test_match_extensions(self, seed):
        s = system(seed)
        k = 28
        for n in range(3, 13):
            f = sum_form(s, k, n)
            assert G_closed_form(n, k, s) == pytest.approx(f.G, rel=1e-12)
            for j in range(1, (2 if n == 3 else n - 2) + 1):
                assert g_closed_form(n, k, j, s) == pytest.approx(f.g.get(j, 0.0), rel=1e-12, abs=1e-14)

    def test_frozen_offsets(self):
        s = system(9)
        k = 25
        for n in range(4, 14):
            for j in range(1, n - 2):
                assert g_closed_form(n + 1, k, j, s) == g_closed_form(n, k, j, s)

    def test_sign_alternates_for_positive_system(self):
        s = constant(0.5, 0.8, 1.3)
        signs = [math.copysign(1, G_closed_form(n, 30, s)) for n in range(3, 12)]
        assert all(x == -y for x, y in zip(signs, signs[1:]))

    def test_invalid_offset(self):
        with pytest.raises(IndexOutOfValidity):
            g_closed_form(6, 20, 5, system(1))


class TestJumps:
    def test_examples(self):
        assert [j.pairs for j in enumerate_jumps(3, 1)] == [((0, 3),)]
        assert [j.pairs for j in enumerate_jumps(3, 3)] == [((0, 1), (1, 2), (2, 3))]
        listed = [j.pairs for j in enumerate_jumps(6, 4)]
        assert len(listed) == 10
        assert ((0, 1), (1, 2), (2, 4), (4, 6)) in listed
        assert listed == sorted(listed)

    @pytest.mark.parametrize("ell", range(1, 13))
    def test_counts(self, ell):
        for p in range(1, ell + 1):
            assert len(enumerate_jumps(ell, p)) == math.comb(ell - 1, p - 1)

    def test_chain_validation(self):
        with pytest.raises(ValueError):
            JumpSequence(((0, 2), (1, 3)))
        with pytest.raises(ValueError):
            JumpSequence(((0, 2), (2, 2)))
        with pytest.raises(ValueError):
            JumpSequence(((1, 2),))

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            enumerate_jumps(3, 4)
        with pytest.raises(ValueError):
            enumerate_jumps(25, 2)


def _form_coef(s):
    def coef(span, anchor, j):
        return sum_form(s, anchor, span).g.get(j, 0.0)
    return coef


class TestPSum:
    def test_single_jump(self):
        s = system(4)
        for ell in range(1, 6):
            assert p_sum(ell, 1, 12, 28, s) == pytest.approx(g_closed_form(12, 28, ell, s), rel=1e-14)

    def test_six_four_by_hand(self):
        s = system(5)
        n, k = 14, 28
        coef = _form_coef(s)
        hand = math.fsum(
            math.prod(coef(n - mu, k - mu, nu - mu) for mu, nu in seq.pairs)
            for seq in enumerate_jumps(6, 4))
        assert p_sum(6, 4, n, k, s) == pytest.approx(hand, rel=1e-12)

    def test_vanishing_factors(self):
        # with c = 0 only jumps of length 1 or 2 carry non-zero coefficients
        s = constant(0.7, -1.1, 0.0)
        for ell in range(1, 8):
            for p in range(1, ell + 1):
                short = [q for q in enumerate_jumps(ell, p) if all(b - a <= 2 for a, b in q.pairs)]
                expect = math.fsum(
                    math.prod(0.7 if b - a == 1 else -1.1 for a, b in q.pairs) for q in short)
                assert p_sum(ell, p, 12, 30, s) == pytest.approx(expect, rel=1e-12, abs=1e-15)


class TestGamma:
    def test_zero_eliminations_is_sum_form(self):
        s = system(6)
        gamma, Gamma = gamma_coeffs(10, 25, 0, s)
        f = sum_form(s, 25, 10)
        assert gamma == {j: f.g.get(j, 0.0) for j in range(1, 9)}
        assert Gamma == f.G

    def test_single_elimination_by_hand(self):
        s = system(7)
        n, k = 10, 25
        f = sum_form(s, k, n)
        sub = sum_form(s, k - 1, n - 1)
        gamma, Gamma = gamma_coeffs(n, k, 1, s)
        h = f.g[1]
        for j in range(2, n - 1):
            assert gamma[j] == pytest.approx(f.g.get(j, 0.0) + h * sub.g.get(j - 1, 0.0), rel=1e-12)
        assert Gamma == pytest.approx(f.G + h * sub.G, rel=1e-12)

    @given(seeds_st, st.integers(4, 14))
    def test_ansatz_holds_for_every_stage(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_system(rng, 30)
        u = trajectory(s, *rng.uniform(-1, 1, 3), 30)
        k = 30
        for ell in range(0, n - 3):
            gamma, Gamma = gamma_coeffs(n, k, ell, s)
            value = math.fsum([c * u[k - j] for j, c in gamma.items()] + [Gamma * u[k - n]])
            assert rel(value, u[k]) <= 1e-9

    @pytest.mark.parametrize("seed", range(4))
    def test_methods_agree(self, seed):
        s = system(seed)
        for n in range(5, 14):
            for ell in range(n - 3):
                ge, Ge = gamma_coeffs(n, 28, ell, s, method="elimination")
                gj, Gj = gamma_coeffs(n, 28, ell, s, method="jumps")
                assert Gj == pytest.approx(Ge, rel=1e-9, abs=1e-12)
                for j in ge:
                    assert gj[j] == pytest.approx(ge[j], rel=1e-9, abs=1e-12)

    def test_chain_sum_is_eliminated_coefficient(self):
        s = system(8)
        n, k = 12, 28
        for ell in range(1, n - 4):
            gamma, _ = gamma_coeffs(n, k, ell - 1, s)
            assert chain_sum(ell, n, k, s) == pytest.approx(gamma[ell], rel=1e-10)

    def test_validity(self):
        s = system(1)
        with pytest.raises(IndexOutOfValidity):
            gamma_coeffs(8, 25, 5, s)
        with pytest.raises(IndexOutOfValidity):
            gamma_coeffs(3, 25, 0, s)
        with pytest.raises(IndexOutOfValidity):
            gamma_coeffs(10, 8, 0, s)
        with pytest.raises(ValueError):
            gamma_coeffs(10, 25, 0, s, method="nope")


class TestSolve:
    @given(seeds_st, st.integers(10, 30), st.data())
    def test_matches_iteration(self, seed, k, data):
        n = data.draw(st.integers(7, k - 3))
        rng = np.random.default_rng(seed)
        s = random_system(rng, 30)
        u = trajectory(s, *rng.uniform(-1, 1, 3), 30)
        got = solve_uk(s, u[k - n + 3], u[k - n + 2], u[k - n], k, n)
        assert rel(got, u[k]) <= 1e-9

    def test_tribonacci(self):
        s = constant(1.0, 1.0, 1.0)
        u = trajectory(s, 1, 1, 1, 20)
        for n in range(4, 18):
            assert solve_uk(s, u[20 - n + 3], u[20 - n + 2], u[20 - n], 20, n) == pytest.approx(u[20], rel=1e-12)

    def test_second_order_ignores_far_seed(self):
        s = constant(0.9, -0.6, 0.0)
        w3, w2, w0 = three_term_coeffs(s, 25, 12)
        assert w0 == 0.0
        u = trajectory(s, 0.2, 0.4, -1.0, 25)
        assert w3 * u[16] + w2 * u[15] == pytest.approx(u[25], rel=1e-12)

    def test_degenerate(self):
        b = [1.0] * 31
        b[20] = 0.0
        s = RecursionSystem((1.0,) * 31, tuple(b), (1.0,) * 31)
        with pytest.raises(DegenerateB):
            solve_uk(s, 1, 1, 1, 25, 10)


class TestDeltaExplicit:
    def test_free_case(self):
        assert all(delta_explicit(MathieuParams(1.7, 0.0), k) == 1.0 for k in range(12))

    @pytest.mark.parametrize("k,n", [(4, 4), (10, 7), (20, 20), (30, 11), (40, 40)])
    def test_matches_series(self, unit_params, k, n):
        ref = delta_series(unit_params, n_max=40, tol=0.0).deltas[k]
        assert delta_explicit(unit_params, k, n) == pytest.approx(ref, rel=1e-9)

    def test_jump_method(self, unit_params):
        ref = delta_series(unit_params, n_max=12, tol=0.0).deltas[12]
        assert delta_explicit(unit_params, 12, method="jumps") == pytest.approx(ref, rel=1e-9)

    def test_vanishing_beta_one(self):
        # beta_1 = 1 - q^2 / (a (a - 4)) vanishes at a = 2 + sqrt(5) for q = 1
        p = MathieuParams(2.0 + math.sqrt(5.0), 1.0)
        with pytest.raises(DegenerateB) as info:
            delta_explicit(p, 10)
        assert info.value.index == 1

    def test_span_out_of_range(self, unit_params):
        with pytest.raises(IndexOutOfValidity):
            delta_explicit(unit_params, 10, 11)
