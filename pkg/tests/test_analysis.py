"""Peak statistics, damped-oscillation fitting, anti-phase, CS witness."""

import math

import numpy as np
import pytest

from hbtsim.analysis import (
    FitResult,
    SpecMismatchError,
    WindowTooNarrowError,
    antiphase_score,
    cs_witness,
    damped_oscillation_jacobian,
    damped_oscillation_model,
    fit_damped_oscillation,
    peak_stats,
    write_witness_csv,
)
from hbtsim.correlator import Correlogram, CorrelogramMeta, CorrelogramSpec

SPEC = CorrelogramSpec(1_000, -500_000, 500_000)
META = CorrelogramMeta(n_a=1, n_b=1, duration=1, channels=(0, 1))


def curve_correlogram(spec, g2, counts=10_000):
    g2 = np.asarray(g2, dtype=float)
    counts = np.full(spec.n_bins, counts, dtype=np.int64)
    err = np.where(g2 > 0, g2 / np.sqrt(counts), 0.0)
    return Correlogram(spec, counts, g2, err, META)


def analytic_correlogram(sigma2, t_osc, tau_d, spec=SPEC, counts=10_000, baseline=1.0):
    g2 = np.exp(damped_oscillation_model(spec.centers, sigma2, t_osc, tau_d, math.log(baseline)))
    return curve_correlogram(spec, g2, counts)


class TestPeakStats:
    def test_flat_curve(self):
        c = curve_correlogram(SPEC, np.ones(SPEC.n_bins))
        ps = peak_stats(c)
        assert ps.g2_zero == 1.0
        assert ps.visibility == 0.0

    def test_analytic_nine(self):
        c = analytic_correlogram(math.log(9.0), 40_000, 190_000)
        ps = peak_stats(c)
        k0 = c.bin_index(0)
        assert ps.g2_zero == pytest.approx(float(c.g2[k0]))
        assert ps.g2_zero == pytest.approx(9.0, rel=0.05)
        assert 15_000 < ps.min_lag < 25_000  # first minimum near half a period
        assert 0.9 < ps.visibility <= 1.0

    def test_window_must_contain_zero(self):
        spec = CorrelogramSpec(1_000, 10_000, 50_000)
        c = curve_correlogram(spec, np.ones(spec.n_bins))
        with pytest.raises(WindowTooNarrowError):
            peak_stats(c)

    def test_too_few_positive_bins(self):
        spec = CorrelogramSpec(1_000, -10_000, 3_000)
        c = curve_correlogram(spec, np.ones(spec.n_bins))
        with pytest.raises(WindowTooNarrowError):
            peak_stats(c)


class TestFit:
    def test_noiseless_roundtrip(self):
        c = analytic_correlogram(math.log(6.0), 40_000, 190_000)
        fit = fit_damped_oscillation(c)
        assert fit.converged
        assert fit.sigma2 == pytest.approx(math.log(6.0), rel=1e-3)
        assert fit.t_osc == pytest.approx(40_000, rel=1e-3)
        assert fit.tau_d == pytest.approx(190_000, rel=1e-3)
        assert fit.baseline == pytest.approx(1.0, rel=1e-3)

    def test_baseline_recovered(self):
        c = analytic_correlogram(1.2, 55_000, 120_000, baseline=1.1)
        fit = fit_damped_oscillation(c)
        assert fit.converged and fit.baseline == pytest.approx(1.1, rel=1e-3)

    def test_initial_guess_path(self):
        c = analytic_correlogram(1.0, 40_000, 190_000)
        init = FitResult(0.8, 43_000, 150_000, 1.0, 0.0, True, 0)
        fit = fit_damped_oscillation(c, initial=init)
        assert fit.converged and fit.t_osc == pytest.approx(40_000, rel=1e-3)

    def test_flat_input_degenerate(self):
        c = curve_correlogram(SPEC, np.ones(SPEC.n_bins))
        fit = fit_damped_oscillation(c)
        assert abs(fit.sigma2) < 0.05 or not fit.converged

    def test_nonpositive_bins_excluded_and_counted(self):
        c0 = analytic_correlogram(math.log(6.0), 40_000, 190_000)
        g2 = c0.g2.copy()
        counts = c0.counts.copy()
        counts[10:20] = 0  # empty bins drop out of the fit
        err = np.where(g2 > 0, g2 / np.sqrt(np.maximum(counts, 1)), 0.0)
        c = Correlogram(SPEC, counts, g2, err, META)
        fit = fit_damped_oscillation(c)
        assert fit.excluded_bins == 10
        assert fit.converged and fit.t_osc == pytest.approx(40_000, rel=1e-2)

    def test_too_few_bins_rejected(self):
        spec = CorrelogramSpec(1_000, -5_000, 5_000)
        c = curve_correlogram(spec, np.ones(spec.n_bins))
        with pytest.raises(WindowTooNarrowError):
            fit_damped_oscillation(c)

    def test_jacobian_matches_central_differences(self):
        rng = np.random.default_rng(2)
        taus = rng.uniform(-450_000, 450_000, 300)
        for _ in range(5):
            p = np.array(
                [
                    rng.uniform(0.5, 2.5),
                    rng.uniform(20_000, 80_000),
                    rng.uniform(50_000, 400_000),
                    rng.uniform(-0.1, 0.1),
                ]
            )
            jac = damped_oscillation_jacobian(taus, *p)
            steps = np.array([1e-6, 1e-2, 1e-1, 1e-7])
            for i in range(4):
                dp = np.zeros(4)
                dp[i] = steps[i]
                fd = (
                    damped_oscillation_model(taus, *(p + dp))
                    - damped_oscillation_model(taus, *(p - dp))
                ) / (2 * steps[i])
                denom = np.maximum(np.abs(jac[:, i]), 1e-3)
                assert np.max(np.abs(fd - jac[:, i]) / denom) < 1e-6


class TestAntiphase:
    def test_self_is_plus_one(self):
        c = analytic_correlogram(1.0, 40_000, 190_000)
        assert antiphase_score(c, c) == pytest.approx(1.0)

    def test_mirrored_is_minus_one(self):
        x = analytic_correlogram(1.0, 40_000, 190_000)
        y = curve_correlogram(SPEC, 2.0 - x.g2)
        assert antiphase_score(x, y) == pytest.approx(-1.0)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(3)
        x = curve_correlogram(SPEC, np.abs(1 + 0.3 * rng.standard_normal(SPEC.n_bins)))
        y = curve_correlogram(SPEC, np.abs(1 + 0.3 * rng.standard_normal(SPEC.n_bins)))
        assert antiphase_score(x, y) == antiphase_score(y, x)

    def test_spec_mismatch_rejected(self):
        x = analytic_correlogram(1.0, 40_000, 190_000)
        y = analytic_correlogram(1.0, 40_000, 190_000, spec=CorrelogramSpec(2_000, -500_000, 500_000))
        with pytest.raises(SpecMismatchError):
            antiphase_score(x, y)

    def test_zero_counts_bins_ignored(self):
        x = analytic_correlogram(1.0, 40_000, 190_000)
        counts = x.counts.copy()
        counts[:100] = 0
        y = Correlogram(SPEC, counts, x.g2, x.g2_err, META)
        assert antiphase_score(y, y) == pytest.approx(1.0)


class TestWitness:
    def test_flat_unit_inputs(self):
        c = curve_correlogram(SPEC, np.ones(SPEC.n_bins))
        w = cs_witness(1.0, 1.0, c)
        assert np.all(w.w == 1.0)

    def test_error_propagation(self):
        c = analytic_correlogram(1.0, 40_000, 190_000)
        w = cs_witness(2.0, 3.0, c)
        assert np.allclose(w.w, c.g2**2 / 6.0)
        assert np.allclose(w.w_err, 2 * c.g2 * c.g2_err / 6.0)

    def test_nonpositive_inputs_rejected(self):
        c = curve_correlogram(SPEC, np.ones(SPEC.n_bins))
        with pytest.raises(ValueError):
            cs_witness(0.0, 1.0, c)

    def test_csv(self, tmp_path):
        c = curve_correlogram(SPEC, np.ones(SPEC.n_bins))
        w = cs_witness(1.0, 1.0, c)
        path = tmp_path / "w.csv"
        text = write_witness_csv(w, str(path))
        assert text.splitlines()[0] == "tau_ps,W,W_err"
        assert path.read_text() == text
