"""Quantitative signatures extracted from correlograms.

The central tool is a weighted least-squares fit of the damped-oscillation
law in log space,

    ln g2(tau) = ln(baseline) + s2 * exp(-|tau|/tau_d) * cos(2 pi tau / t_osc),

which is exactly linear in (s2, ln baseline) at fixed (t_osc, tau_d). The
optimizer therefore runs a coarse grid over (t_osc, tau_d) with closed-form
linear solves (immune to period-halving traps), then refines all four
parameters with Levenberg-Marquardt using the analytic Jacobian.

Fitting ln g2 rather than g2 - 1 keeps the model linear in the peak
log-amplitude and reaches the deep minima (g2 << 1) that an additive damped
cosine cannot represent. Bins with zero counts or nonpositive g2 carry no
log-space information and are excluded; the exclusion count is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .correlator import Correlogram

_TWO_PI = 2.0 * math.pi


class SpecMismatchError(ValueError):
    """Two correlograms with different lag axes were combined."""


class WindowTooNarrowError(ValueError):
    """Correlogram window cannot support the requested statistic."""


@dataclass(frozen=True)
class PeakStats:
    """Zero-lag peak, first-minimum depth, and modulation visibility."""

    g2_zero: float
    min_value: float
    min_lag: float  # ps, bin center of the minimum
    visibility: float  # (max - min) / (max + min), in [0, 1]
    baseline: float = 1.0


@dataclass(frozen=True)
class FitResult:
    sigma2: float
    t_osc: float  # ps
    tau_d: float  # ps
    baseline: float
    residual_rms: float
    converged: bool
    iterations: int
    excluded_bins: int = 0


def peak_stats(c: Correlogram, baseline: float = 1.0) -> PeakStats:
    """Peak height at the zero-lag bin and depth of the first minimum.

    The minimum is searched over all positive lags excluding the zero bin;
    for a damped oscillation the global minimum there is the first one,
    since damping shrinks every later extremum toward the baseline.
    """
    spec = c.spec
    if not (spec.tau_min <= 0 < spec.tau_max):
        raise WindowTooNarrowError("correlogram window must contain tau = 0")
    k0 = c.bin_index(0)
    pos = np.arange(spec.n_bins) > k0
    if pos.sum() < 8:
        raise WindowTooNarrowError("too few positive-lag bins to locate a minimum")
    g2_zero = float(c.g2[k0])
    k_min = k0 + 1 + int(np.argmin(c.g2[pos]))
    min_value = float(c.g2[k_min])
    min_lag = float(c.tau[k_min])
    denom = g2_zero + min_value
    visibility = (g2_zero - min_value) / denom if denom > 0 else 0.0
    return PeakStats(g2_zero, min_value, min_lag, float(np.clip(visibility, 0.0, 1.0)), baseline)


def _envelope(tau: np.ndarray, tau_d: float) -> np.ndarray:
    # exponent clamp keeps trial steps with tiny/negative tau_d finite for LM
    return np.exp(np.minimum(-np.abs(tau) / tau_d, 50.0))


def damped_oscillation_model(tau, sigma2: float, t_osc: float, tau_d: float, log_baseline: float):
    """ln g2 model value at lags ``tau`` (ps)."""
    tau = np.asarray(tau, dtype=np.float64)
    return log_baseline + sigma2 * _envelope(tau, tau_d) * np.cos(_TWO_PI * tau / t_osc)


def damped_oscillation_jacobian(tau, sigma2: float, t_osc: float, tau_d: float, log_baseline: float):
    """Analytic d(model)/d(sigma2, t_osc, tau_d, log_baseline), shape (n, 4)."""
    tau = np.asarray(tau, dtype=np.float64)
    env = _envelope(tau, tau_d)
    arg = _TWO_PI * tau / t_osc
    cos_a = np.cos(arg)
    sin_a = np.sin(arg)
    jac = np.empty((tau.size, 4))
    jac[:, 0] = env * cos_a
    jac[:, 1] = sigma2 * env * sin_a * (_TWO_PI * tau / t_osc**2)
    jac[:, 2] = sigma2 * env * cos_a * (np.abs(tau) / tau_d**2)
    jac[:, 3] = 1.0
    return jac


def _usable_bins(c: Correlogram):
    ok = (c.counts > 0) & (c.g2 > 0)
    return c.tau[ok], np.log(c.g2[ok]), np.sqrt(c.counts[ok].astype(np.float64)), int((~ok).sum())


def _grid_seed(tau, y, w, spec) -> tuple:
    """Coarse (t_osc, tau_d) grid with exact linear solves for (s2, ln b)."""
    span = spec.tau_max - spec.tau_min
    t_osc_grid = np.arange(4 * spec.bin_width, span // 3 + 1, spec.bin_width, dtype=np.float64)
    if t_osc_grid.size == 0:
        t_osc_grid = np.array([float(2 * spec.bin_width)])
    tau_d_grid = np.geomspace(5 * spec.bin_width, 2 * span, 12)
    w2 = w * w
    sw = w2.sum()
    best = (np.inf, t_osc_grid[0], tau_d_grid[0], 0.0, 0.0)
    for t_osc in t_osc_grid:
        cos_a = np.cos(_TWO_PI * tau / t_osc)
        for tau_d in tau_d_grid:
            f = np.exp(-np.abs(tau) / tau_d) * cos_a
            # weighted LS for y ~ s2*f + b
            sf = (w2 * f).sum()
            sff = (w2 * f * f).sum()
            sy = (w2 * y).sum()
            sfy = (w2 * f * y).sum()
            det = sff * sw - sf * sf
            if det <= 0:
                continue
            s2 = (sfy * sw - sf * sy) / det
            b = (sy - s2 * sf) / sw
            r = y - s2 * f - b
            ssr = float((w2 * r * r).sum())
            if ssr < best[0] - 1e-12 * max(1.0, best[0]):
                best = (ssr, float(t_osc), float(tau_d), float(s2), float(b))
    return best[1], best[2], best[3], best[4]


def fit_damped_oscillation(c: Correlogram, initial: Optional[FitResult] = None) -> FitResult:
    """Weighted LS fit of the damped-oscillation law to ln g2.

    Weights are 1/sigma(ln g2) = sqrt(counts). Returns best-so-far
    parameters with ``converged=False`` when the refinement does not meet
    its gradient/step criteria or wanders into invalid parameters.
    """
    tau, y, w, excluded = _usable_bins(c)
    if tau.size < 16:
        raise WindowTooNarrowError("fewer than 16 usable bins; cannot fit")
    if initial is not None:
        p0 = (initial.sigma2, initial.t_osc, initial.tau_d, math.log(initial.baseline))
    else:
        t_osc0, tau_d0, s20, b0 = _grid_seed(tau, y, w, c.spec)
        p0 = (s20, t_osc0, tau_d0, b0)

    def residuals(p):
        return w * (y - damped_oscillation_model(tau, *p))

    def jac(p):
        return -w[:, None] * damped_oscillation_jacobian(tau, *p)

    res = least_squares(residuals, p0, jac=jac, method="lm", xtol=1e-12, ftol=1e-12, gtol=1e-12)
    s2, t_osc, tau_d, b = res.x
    valid = t_osc > 0 and tau_d > 0 and math.isfinite(b)
    if not valid:
        s2, t_osc, tau_d, b = p0[0], p0[1], p0[2], p0[3]
    r = y - damped_oscillation_model(tau, s2, t_osc, tau_d, b)
    return FitResult(
        sigma2=float(s2),
        t_osc=float(abs(t_osc)),
        tau_d=float(abs(tau_d)),
        baseline=float(math.exp(b)),
        residual_rms=float(np.sqrt(np.mean(r * r))),
        converged=bool(res.status in (1, 2, 3, 4) and valid),
        iterations=int(res.nfev),
        excluded_bins=excluded,
    )


def antiphase_score(x: Correlogram, y: Correlogram) -> float:
    """Pearson correlation of (g2 - 1) between two correlograms.

    Evaluated over bins where both have counts; -1 means the curves are in
    perfect anti-phase (maxima of one on the minima of the other).
    Symmetric in its arguments by construction. Returns 0.0 for the
    degenerate case of a structureless (zero-variance) input.
    """
    if x.spec != y.spec:
        raise SpecMismatchError("correlograms have different lag axes")
    ok = (x.counts > 0) & (y.counts > 0)
    if ok.sum() < 2:
        return 0.0
    a = x.g2[ok] - 1.0
    b = y.g2[ok] - 1.0
    da = a - a.mean()
    db = b - b.mean()
    va = float((da * da).sum())
    vb = float((db * db).sum())
    if va == 0.0 or vb == 0.0:
        return 0.0
    return float((da * db).sum() / math.sqrt(va * vb))


@dataclass(frozen=True)
class WitnessCurve:
    """Per-bin Cauchy-Schwarz witness W(tau) = g_iv(tau)^2 / (g_ii0 * g_vv0).

    Classical fields obey W <= 1; W > 1 beyond noise certifies
    nonclassicality. Errors propagate the cross-correlogram's Poisson error
    (the zero-lag inputs enter as exact scalars).
    """

    tau: np.ndarray
    w: np.ndarray
    w_err: np.ndarray


def cs_witness(g_ii0: float, g_vv0: float, g_iv: Correlogram) -> WitnessCurve:
    if not (g_ii0 > 0 and g_vv0 > 0):
        raise ValueError("zero-lag autocorrelations must be positive")
    denom = g_ii0 * g_vv0
    w = g_iv.g2**2 / denom
    w_err = 2.0 * g_iv.g2 * g_iv.g2_err / denom
    return WitnessCurve(g_iv.tau.copy(), w, w_err)


def write_witness_csv(curve: WitnessCurve, sink=None) -> str:
    lines = ["tau_ps,W,W_err"]
    tau = curve.tau.tolist()
    w = curve.w.tolist()
    w_err = curve.w_err.tolist()
    for k in range(len(tau)):
        lines.append(f"{tau[k]!r},{w[k]!r},{w_err[k]!r}")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        with open(sink, "w") as fh:
            fh.write(text)
    return text
