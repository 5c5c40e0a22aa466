import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mldcrit.bounds import LOG10E, dominant_weight, max_term_approx
from mldcrit.critical import (
    CriticalPoint,
    critical_point,
    critical_snr,
    critical_wer,
    general_critical_real,
    gv_critical,
)
from mldcrit.numkernel import inverse_binary_entropy
from mldcrit.spectrum import CodeParams, gv_distance_exact

# mpmath at 40 digits: (linear, dB, log10 WER)
FROZEN = {
    (2040, 1912, 17): (5.0990648148261088, 7.07490532372, -31.117898748597693),
    (2040, 1784, 36): (4.5961537603403793, 6.62394549205, -61.289480419370263),
    (2000, 1000, 222): (4.1611340684031409, 6.19211708638, -198.83351760440859),
}


@st.composite
def code_params(draw):
    n = draw(st.integers(min_value=3, max_value=5000))
    k = draw(st.integers(min_value=1, max_value=n - 1))
    d = draw(st.integers(min_value=1, max_value=max(1, n // 2 - 1)))
    return CodeParams(n, k, d)


class TestClosedForms:
    @pytest.mark.parametrize("key", sorted(FROZEN))
    def test_frozen(self, key):
        lin, db, wer = FROZEN[key]
        cp = critical_point(CodeParams(*key))
        assert cp.ebn0_crit_linear == pytest.approx(lin, rel=1e-13)
        assert cp.ebn0_crit_db == pytest.approx(db, abs=1e-10)
        assert cp.log10_wer_crit == pytest.approx(wer, rel=1e-12)

    def test_reported_rounding(self):
        assert critical_point(CodeParams(2040, 1912, 17)).format() == "ebn0_crit_db=7.0749 log10_wer=-31.118"
        assert critical_point(CodeParams(2040, 1784, 36)).format() == "ebn0_crit_db=6.6239 log10_wer=-61.289"

    def test_stated_orders_of_magnitude(self):
        assert round(critical_wer(CodeParams(2040, 1912, 17))) == -31
        assert round(critical_wer(CodeParams(2040, 1784, 36))) == -61
        assert critical_wer(CodeParams(2000, 1000, 222)) < -190

    def test_half_length_distance(self):
        p = CodeParams(2000, 1000, 1000)
        assert critical_snr(p) == 0.0
        cp = critical_point(p)
        assert cp.sub_zero and math.isnan(cp.ebn0_crit_db)
        # the entropy term is 1 and the ratio term is 0, leaving n R log10 2
        assert cp.log10_wer_crit == pytest.approx(general_critical_real(2000, 0.5, 1000.0).log10_wer_crit, rel=1e-14)
        assert cp.log10_wer_crit == pytest.approx(1000 * math.log10(2), rel=1e-14)

    def test_above_half_is_negative_and_flagged(self):
        cp = critical_point(CodeParams(100, 10, 70))
        assert cp.ebn0_crit_linear < 0 and cp.sub_zero
        assert "undefined" in cp.format()

    @pytest.mark.parametrize("n,k,d", [(10, 5, 10)])
    def test_domain(self, n, k, d):
        p = CodeParams(n, k, d)
        for fn in (critical_snr, critical_wer, critical_point):
            with pytest.raises(ValueError):
                fn(p)

    def test_db_view(self):
        cp = CriticalPoint(5.0990648148261088, -31.1)
        assert cp.ebn0_crit_db == pytest.approx(10 * math.log10(cp.ebn0_crit_linear), rel=1e-12)

    def test_wer_non_positive_up_to_gv_distance(self):
        # the invariant log10_wer <= 0 holds while d does not exceed n H^-1(1-R)
        for n, k in ((2040, 1912), (2040, 1784), (2000, 1000), (255, 223)):
            p_star = inverse_binary_entropy(1 - k / n)
            for d in range(1, math.floor(n * p_star) + 1):
                assert critical_wer(CodeParams(n, k, d)) <= 0.0


class TestIdentities:
    @settings(max_examples=1000, deadline=None)
    @given(code_params())
    def test_dominant_weight_at_critical_snr(self, p):
        assert dominant_weight(p, critical_snr(p)) == pytest.approx(p.d, rel=1e-9)

    @settings(max_examples=1000, deadline=None)
    @given(code_params())
    def test_max_term_at_critical_snr(self, p):
        val = max_term_approx(p, critical_snr(p)) * LOG10E
        assert abs(val - critical_wer(p)) <= 1e-9 * max(1.0, abs(critical_wer(p)))

    @pytest.mark.parametrize("n,k", [(2040, 1912), (2040, 1784), (2000, 1000)])
    def test_snr_decreasing_in_distance(self, n, k):
        snr = [critical_snr(CodeParams(n, k, d)) for d in range(1, n)]
        assert all(b < a for a, b in zip(snr, snr[1:]))

    @pytest.mark.parametrize("n,k", [(2040, 1912), (2040, 1784), (2000, 1000)])
    def test_wer_increasing_in_distance(self, n, k):
        # d/dd of the log10 closed form is log10(e) n / (n - d) > 0: a larger
        # distance moves the critical point to lower SNR and higher WER
        wer = [critical_wer(CodeParams(n, k, d)) for d in range(1, n // 2 + 1)]
        assert all(b > a for a, b in zip(wer, wer[1:]))
        for d in (5.0, 17.0, 222.0, 900.0):
            h = 1e-4
            num = (general_critical_real(n, k / n, d + h).log10_wer_crit - general_critical_real(n, k / n, d - h).log10_wer_crit) / (2 * h)
            assert num == pytest.approx(LOG10E * n / (n - d), rel=1e-6)


class TestGilbertVarshamov:
    def test_rate_half(self):
        # H^-1(1/2) = 0.1100278644, so 2 ln(1/p - 1) = 4.18091...
        cp = gv_critical(2000, 0.5)
        p = inverse_binary_entropy(0.5)
        assert cp.ebn0_crit_linear == pytest.approx(2 * math.log(1 / p - 1), rel=1e-14)
        assert cp.ebn0_crit_linear == pytest.approx(4.1809, abs=1e-4)
        assert abs(cp.ebn0_crit_linear - 4.183) < 5e-3

    @pytest.mark.parametrize("n,rate", [(2000, 0.5), (2040, 1912 / 2040), (2040, 0.875), (500, 0.3)])
    def test_matches_general_form(self, n, rate):
        d = n * inverse_binary_entropy(1 - rate)
        a, b = gv_critical(n, rate), general_critical_real(n, rate, d)
        assert a.ebn0_crit_linear == pytest.approx(b.ebn0_crit_linear, rel=1e-9)
        assert a.log10_wer_crit == pytest.approx(b.log10_wer_crit, rel=1e-9)

    def test_snr_grows_with_rate_above_minimum(self):
        vals = [gv_critical(2000, r).ebn0_crit_linear for r in (0.65, 0.7, 0.8, 0.9, 0.95, 0.99)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_snr_not_monotone_in_rate(self):
        # the critical SNR has an interior minimum near R = 0.64, so rate 1/2
        # sits above rate 0.7
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(lambda r: gv_critical(2000, r).ebn0_crit_linear, bounds=(0.3, 0.9), method="bounded")
        assert 0.6 < res.x < 0.68
        assert res.fun == pytest.approx(4.08, abs=0.01)
        assert gv_critical(2000, 0.5).ebn0_crit_linear > gv_critical(2000, 0.7).ebn0_crit_linear

    def test_lower_rate_lower_wer(self):
        vals = [gv_critical(2040, r).log10_wer_crit for r in (0.937, 0.875, 0.5)]
        assert vals[0] > vals[1] > vals[2]

    def test_lower_rate_lower_wer_integer_distance(self):
        vals = []
        for k in (1912, 1784, 1020):
            vals.append(critical_wer(CodeParams(2040, k, gv_distance_exact(2040, k))))
        assert vals[0] > vals[1] > vals[2]

    @pytest.mark.parametrize("rate", [0.0, 1.0, 1.5])
    def test_domain(self, rate):
        with pytest.raises(ValueError):
            gv_critical(100, rate)
