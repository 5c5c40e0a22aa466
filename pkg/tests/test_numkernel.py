import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mldcrit.numkernel import (
    Q_SWITCH,
    binary_entropy,
    inverse_binary_entropy,
    ln_binomial,
    ln_q,
    ln_q_array,
    log_betainc,
    log_diff_exp,
    log_gammainc,
    log_gammaincc,
    log_sum_exp,
)

# ln Q(x) from mpmath erfc at 50 digits
LN_Q_FROZEN = {
    -10.0: -7.619853024160526066e-24,
    -1.0: -0.17275377902344988953,
    0.0: -0.69314718055994530942,
    0.5: -1.1759117615936186089,
    1.0: -1.8410216450092635058,
    7.999: -35.005316284639320657,
    8.0: -35.013437159914549896,
    8.001: -35.021559020864888385,
    20.0: -203.91715537109726394,
    37.5: -707.66898931750719107,
    60.0: -1805.0135606805671387,
}

# ln C(2040, i) from exact big integers, mpmath log at 25 digits
LN_BINOM_2040 = {
    1: 7.620705086838262074497236,
    17: 95.98006589112936806733065,
    36: 178.3150579280718794033419,
    1020: 1409.983981897209872825815,
}


def _mp_ln_q(x):
    mpmath.mp.dps = 50
    return float(mpmath.log(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2))


class TestLnBinomial:
    def test_small_exact(self):
        assert ln_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-15)
        assert ln_binomial(9, 0) == 0.0
        assert ln_binomial(9, 9) == 0.0

    @pytest.mark.parametrize("i", sorted(LN_BINOM_2040))
    def test_frozen_2040(self, i):
        assert ln_binomial(2040, i) == pytest.approx(LN_BINOM_2040[i], rel=1e-13)

    @pytest.mark.parametrize("i", [1, 17, 36, 1020, 2039])
    def test_big_integer_oracle(self, i):
        exact = math.log(math.comb(2040, i))
        assert abs(ln_binomial(2040, i) - exact) <= 1e-12 * exact

    def test_large_n_no_overflow(self):
        n = 10**6
        v = ln_binomial(n, n // 3)
        assert math.isfinite(v)
        mpmath.mp.dps = 40
        ref = mpmath.loggamma(n + 1) - mpmath.loggamma(n // 3 + 1) - mpmath.loggamma(n - n // 3 + 1)
        assert v == pytest.approx(float(ref), rel=1e-12)

    def test_symmetry_exact(self):
        for n in range(101):
            for i in range(n + 1):
                assert ln_binomial(n, i) == ln_binomial(n, n - i)

    def test_pascal(self):
        for n in range(2, 61):
            for i in range(1, n):
                rhs = math.comb(n - 1, i - 1) + math.comb(n - 1, i)
                assert abs(math.exp(ln_binomial(n, i)) - rhs) <= 1e-10 * rhs

    @pytest.mark.parametrize("n,i", [(3, 4), (-1, 0), (5, -2), (5, 2.5)])
    def test_domain_errors(self, n, i):
        with pytest.raises(ValueError):
            ln_binomial(n, i)


class TestEntropy:
    def test_endpoints_and_peak(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == 1.0

    def test_value_at_17_over_2040(self):
        mpmath.mp.dps = 40
        p = mpmath.mpf(17) / 2040
        ref = float(-p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2))
        assert binary_entropy(17 / 2040) == pytest.approx(ref, rel=1e-14)
        assert binary_entropy(17 / 2040) == pytest.approx(0.069530, abs=5e-6)

    @given(st.integers(min_value=0, max_value=2**40))
    def test_symmetric(self, j):
        # dyadic p so that 1 - p is exact and the reflection is the same number
        p = j / 2**40
        assert binary_entropy(p) == binary_entropy(1.0 - p)

    @pytest.mark.parametrize("p", [-0.1, 1.5, math.nan])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            binary_entropy(p)

    def test_inverse_endpoints(self):
        assert inverse_binary_entropy(1.0) == 0.5
        assert inverse_binary_entropy(0.0) == 0.0

    def test_inverse_at_half(self):
        mpmath.mp.dps = 40
        ref = mpmath.findroot(lambda p: -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2) - 0.5, 0.11)
        assert inverse_binary_entropy(0.5) == pytest.approx(float(ref), abs=1e-12)
        # 0.1100278644..., which rounds to 0.110028
        assert round(inverse_binary_entropy(0.5), 6) == 0.110028

    def test_right_inverse_on_grid(self):
        ys = np.linspace(0.0, 1.0, 1000)
        worst = max(abs(binary_entropy(inverse_binary_entropy(y)) - y) for y in ys)
        assert worst <= 1e-12

    @pytest.mark.parametrize("y", [-1e-9, 1.000001])
    def test_inverse_domain(self, y):
        with pytest.raises(ValueError):
            inverse_binary_entropy(y)


class TestLnQ:
    @pytest.mark.parametrize("x", sorted(LN_Q_FROZEN))
    def test_frozen(self, x):
        assert ln_q(x) == pytest.approx(LN_Q_FROZEN[x], rel=1e-12)

    def test_zero(self):
        assert ln_q(0.0) == pytest.approx(math.log(0.5), rel=1e-15)

    def test_reflection(self):
        x = 1.3
        assert math.exp(ln_q(x)) + math.exp(ln_q(-x)) == pytest.approx(1.0, abs=1e-15)

    def test_relative_error_against_mpmath(self):
        xs = np.linspace(-10.0, 60.0, 200)
        worst = max(abs(ln_q(x) - _mp_ln_q(x)) / abs(_mp_ln_q(x)) for x in xs)
        assert worst <= 1e-10

    def test_continuity_at_switch(self):
        eps = 1e-12
        assert abs(ln_q(Q_SWITCH - eps) - ln_q(Q_SWITCH + eps)) <= 1e-10

    def test_monotone(self):
        xs = np.linspace(-12.0, 80.0, 5001)
        vals = np.array([ln_q(x) for x in xs])
        assert np.all(np.diff(vals) < 0)

    def test_infinities(self):
        assert ln_q(math.inf) == -math.inf
        assert ln_q(-math.inf) == 0.0

    def test_array_matches_scalar(self):
        xs = np.concatenate([np.linspace(-10, 60, 301), [Q_SWITCH, 1e3]])
        arr = ln_q_array(xs)
        ref = np.array([ln_q(x) for x in xs])
        np.testing.assert_allclose(arr, ref, rtol=1e-13)


class TestLogSumExp:
    def test_singleton(self):
        assert log_sum_exp([math.log(3.7)]) == pytest.approx(math.log(3.7), rel=1e-15)

    def test_neg_inf_absorbed(self):
        assert log_sum_exp([-2.5, -math.inf]) == -2.5

    def test_small_exact(self):
        assert log_sum_exp([math.log(2), math.log(3)]) == pytest.approx(math.log(5), rel=1e-15)

    def test_empty(self):
        with pytest.raises(ValueError):
            log_sum_exp([])

    def test_extreme_values(self):
        assert log_sum_exp([-5000.0, -5000.0]) == pytest.approx(-5000.0 + math.log(2), rel=1e-15)
        assert log_sum_exp([-math.inf, -math.inf]) == -math.inf

    @settings(max_examples=200)
    @given(st.lists(st.floats(min_value=-800, max_value=50), min_size=1, max_size=30), st.randoms())
    def test_permutation_invariance(self, values, rnd):
        shuffled = list(values)
        rnd.shuffle(shuffled)
        a, b = log_sum_exp(values), log_sum_exp(shuffled)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    @settings(max_examples=200)
    @given(st.lists(st.floats(min_value=-800, max_value=50), min_size=2, max_size=30), st.data())
    def test_associativity(self, values, data):
        cut = data.draw(st.integers(min_value=1, max_value=len(values) - 1))
        nested = log_sum_exp([log_sum_exp(values[:cut]), log_sum_exp(values[cut:])])
        flat = log_sum_exp(values)
        assert abs(nested - flat) <= 1e-12 * max(1.0, abs(flat))


class TestIncompleteFunctions:
    @pytest.mark.parametrize("a,x", [(2.5, 0.3), (1019.0, 10.0), (1019.0, 300.0), (7.0, 1e-3)])
    def test_lower_gamma(self, a, x):
        mpmath.mp.dps = 40
        ref = float(mpmath.log(mpmath.gammainc(a, 0, x, regularized=True)))
        assert log_gammainc(a, x) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("a,x", [(2.5, 3.0), (1019.5, 3000.0), (1019.5, 1500.0), (3.0, 800.0)])
    def test_upper_gamma(self, a, x):
        mpmath.mp.dps = 40
        ref = float(mpmath.log(mpmath.gammainc(a, x, mpmath.inf, regularized=True)))
        assert log_gammaincc(a, x) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("a,b,x", [(1019.0, 0.5, 0.3), (1019.0, 0.5, 0.9), (6.5, 0.5, 0.4), (2.0, 0.5, 1e-6)])
    def test_beta(self, a, b, x):
        mpmath.mp.dps = 40
        ref = float(mpmath.log(mpmath.betainc(a, b, 0, x, regularized=True)))
        assert log_betainc(a, b, x) == pytest.approx(ref, rel=1e-10)

    def test_log_diff_exp(self):
        assert log_diff_exp(math.log(5.0), math.log(3.0)) == pytest.approx(math.log(2.0), rel=1e-14)
        assert log_diff_exp(-1.0, -math.inf) == -1.0
        assert log_diff_exp(-1.0, -1.0) == -math.inf
