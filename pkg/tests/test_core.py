"""Quantiles, tau-b, Fisher's exact test, and the Huber line fit."""

import numpy as np
import pytest
from scipy import stats

from stataudit.core.dists import DistSpec, cdf, quantile, two_tailed_p
from stataudit.core.fisher import fisher_exact_2x2
from stataudit.core.huber import huber_iwls
from stataudit.core.kendall import kendall_tau_b
from stataudit.errors import (DegenerateTableError, DomainError,
                              UndefinedCorrelationError)


class TestDists:
    def test_central_quantiles_round_trip(self):
        specs = [DistSpec("normal"), DistSpec("t", df1=13.0),
                 DistSpec("chi2", df1=4.0), DistSpec("f", df1=3.0, df2=71.0)]
        for spec in specs:
            for p in (0.001, 0.05, 0.4, 0.77, 0.999):
                x = quantile(spec, p)
                assert cdf(spec, x) == pytest.approx(p, abs=1e-9)

    def test_noncentral_quantile_round_trip(self):
        spec = DistSpec("t", df1=30.0, ncp=2.2)
        for p in (0.02, 0.5, 0.93):
            assert cdf(spec, quantile(spec, p)) == pytest.approx(p, abs=1e-8)
        spec = DistSpec("chi2", df1=2.0, ncp=8.0)
        for p in (0.1, 0.6, 0.99):
            assert cdf(spec, quantile(spec, p)) == pytest.approx(p, abs=1e-8)

    def test_quantiles_match_scipy(self):
        assert quantile(DistSpec("t", df1=48.0), 0.975) == pytest.approx(
            stats.t.ppf(0.975, 48), abs=1e-9)
        assert quantile(DistSpec("chi2", df1=1.0), 0.95) == pytest.approx(
            stats.chi2.ppf(0.95, 1), abs=1e-9)
        assert quantile(DistSpec("f", df1=2.0, df2=87.0),
                        0.95) == pytest.approx(
            stats.f.ppf(0.95, 2, 87), abs=1e-8)

    def test_two_tailed_p(self):
        assert two_tailed_p(1.959963984540054) == pytest.approx(0.05,
                                                                abs=1e-12)
        assert two_tailed_p(0.0) == 1.0

    def test_bad_spec_rejected(self):
        with pytest.raises(DomainError):
            DistSpec("t").validate()
        with pytest.raises(DomainError):
            DistSpec("gamma", df1=2.0).validate()


class TestKendall:
    def test_matches_scipy_with_ties(self, rng):
        for trial in range(25):
            n = int(rng.integers(4, 40))
            x = rng.integers(0, 6, n).astype(float)
            y = rng.integers(0, 6, n).astype(float)
            if len(set(x.tolist())) < 2 or len(set(y.tolist())) < 2:
                continue
            tau, p = kendall_tau_b(x, y)
            ref = stats.kendalltau(x, y, method="asymptotic")
            assert tau == pytest.approx(ref.statistic, abs=1e-12)
            assert p == pytest.approx(ref.pvalue, abs=1e-10)

    def test_perfect_orderings(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        tau, _ = kendall_tau_b(x, x)
        assert tau == 1.0
        tau, _ = kendall_tau_b(x, x[::-1])
        assert tau == -1.0

    def test_all_ties_raise(self):
        with pytest.raises(UndefinedCorrelationError):
            kendall_tau_b([1.0, 1.0, 1.0], [0.2, 0.5, 0.9])


class TestFisher:
    def test_matches_scipy_p(self, rng):
        for trial in range(30):
            table = rng.integers(1, 40, size=(2, 2))
            mine = fisher_exact_2x2(tuple(map(tuple, table.tolist())))
            _, p_ref = stats.fisher_exact(table)
            assert mine.p == pytest.approx(p_ref, rel=1e-9, abs=1e-12)

    def test_sample_or_and_ci(self):
        res = fisher_exact_2x2(((20, 10), (10, 20)))
        assert res.sample_or == pytest.approx(4.0)
        lo, hi = res.sample_or_ci
        assert lo < 4.0 < hi

    def test_zero_margin_rejected(self):
        with pytest.raises(DegenerateTableError):
            fisher_exact_2x2(((0, 0), (5, 9)))

    def test_non_integer_rejected(self):
        with pytest.raises(DomainError):
            fisher_exact_2x2(((1.5, 2), (3, 4)))


class TestHuber:
    def test_recovers_clean_line(self, rng):
        x = np.linspace(0.0, 1.0, 40)
        y = 1.3 - 0.8 * x + rng.normal(0.0, 0.01, 40)
        fit = huber_iwls(x, y)
        assert fit.converged
        assert fit.intercept == pytest.approx(1.3, abs=0.02)
        assert fit.slope == pytest.approx(-0.8, abs=0.04)

    def test_resists_outliers(self, rng):
        x = np.linspace(0.0, 1.0, 60)
        y = 2.0 + 1.0 * x + rng.normal(0.0, 0.05, 60)
        y[:6] += 25.0       # gross contamination
        fit = huber_iwls(x, y)
        ols_b = np.polyfit(x, y, 1)[0]
        assert abs(fit.slope - 1.0) < 0.35
        assert abs(fit.slope - 1.0) < abs(ols_b - 1.0)

    def test_shift_invariance_in_x(self, rng):
        x = np.linspace(0.2, 0.9, 30)
        y = 0.5 + 2.0 * x + rng.normal(0.0, 0.1, 30)
        base = huber_iwls(x, y)
        shifted = huber_iwls(x - 1.0, y)
        assert shifted.slope == pytest.approx(base.slope, abs=1e-9)
        # intercept of the shifted fit is the prediction at x = 1
        assert shifted.intercept == pytest.approx(
            base.intercept + base.slope, abs=1e-9)
