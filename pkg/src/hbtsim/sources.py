"""Classical light-source models and their photonization.

Every source is a stationary (or deterministically modulated) classical
intensity process I(t) >= 0 in counts/s. Detection is doubly stochastic
Poisson: given a sampled intensity trace, photon counts per dt-bin are
Poisson(I*dt) with uniform placement inside the bin. Each model carries a
closed-form g2 (``analytic_g2``) used as the oracle for the correlator
estimates.

Model zoo:

* Coherent        -- constant intensity; g2 = 1 at all lags.
* Chaotic         -- |E|^2 of a complex Ornstein-Uhlenbeck field with
                     coherence time tau_c; Siegert: g2 = 1 + exp(-2|tau|/tau_c).
* Modulated       -- coherent or chaotic base times a raised-cosine
                     envelope 1 + depth*cos(2 pi t / period).
* PulseTrainMultimode -- n staggered rectangular pulse trains; with
                     duty = 1/n the summed intensity is constant at every
                     sample while each mode alone is strongly bunched
                     (g2(0) = n).
* LogGaussianCox  -- lognormal intensity driven by a damped-oscillation
                     Gaussian process: g2 = exp(s2 * exp(-|tau|/tau_d)
                     * cos(2 pi tau / t_osc)). Reproduces a bunched,
                     oscillating, damped single-mode autocorrelation.
* CorrelatedPair  -- joint (total, mode) lognormal intensities whose
                     cross-covariance has sign rho and lag delta; one sign
                     flip switches the cross-correlogram between a bunching
                     peak and an anticorrelation dip at tau = delta.

The damped-oscillation Gaussian driver is d(t) = x(t) cos(w t) +
y(t) sin(w t) with x, y independent unit-variance OU processes of
relaxation time tau_d, giving Cov[d(t), d(t+tau)] =
exp(-|tau|/tau_d) cos(w tau) exactly. OU chains use the exact discrete
update x' = x*exp(-dt/tau) + sqrt(1-exp(-2dt/tau))*xi, so statistics are
exact at any dt.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np
from scipy.signal import lfilter

from .tags import TagStream

_PS = 1e-12
_TWO_PI = 2.0 * math.pi

# Default chunk for streaming generation; fixed so results never depend on
# available memory.
CHUNK_SAMPLES = 1 << 22

# sample_intensity materializes one array; larger requests must stream
# through sample_photons instead.
MAX_TRACE_SAMPLES = 1 << 26

# Per-bin Poisson mean budget for photonization.
MAX_BIN_MEAN = float(2**31)


class DtTooCoarseError(ValueError):
    """dt fails to resolve the model's fastest time constant."""


class UnsupportedCorrelatorKindError(ValueError):
    """analytic_g2 asked for a correlator this model does not define."""


class PhotonBudgetError(ValueError):
    """Expected photon count per bin exceeds the sampler budget."""


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """Independent generator hashed from (master seed, stream labels)."""
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for lab in labels:
        digest = hashlib.blake2b(str(lab).encode(), digest_size=8).digest()
        words.append(int.from_bytes(digest, "little"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


def _require_finite(name: str, *values) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name}: non-finite parameter {v!r}")


@dataclass(frozen=True)
class Coherent:
    """Constant-intensity beam (per-mode content of an ideal cw laser)."""

    rate: float  # counts/s

    def __post_init__(self):
        _require_finite("Coherent", self.rate)
        if self.rate < 0:
            raise ValueError("rate must be >= 0")


@dataclass(frozen=True)
class Chaotic:
    """Thermal light with field coherence time tau_c (ps)."""

    rate: float
    tau_c: int

    def __post_init__(self):
        _require_finite("Chaotic", self.rate, self.tau_c)
        if self.rate < 0:
            raise ValueError("rate must be >= 0")
        if self.tau_c <= 0:
            raise ValueError("tau_c must be > 0")


@dataclass(frozen=True)
class Modulated:
    """Externally modulated lamp: base intensity times a raised cosine."""

    base: Union[Coherent, Chaotic]
    period: int  # ps
    depth: float  # 0..1

    def __post_init__(self):
        if not isinstance(self.base, (Coherent, Chaotic)):
            raise ValueError("Modulated base must be Coherent or Chaotic")
        _require_finite("Modulated", self.period, self.depth)
        if self.period <= 0:
            raise ValueError("period must be > 0")
        if not 0.0 <= self.depth <= 1.0:
            raise ValueError("depth must lie in [0, 1]")


@dataclass(frozen=True)
class PulseTrainMultimode:
    """n staggered rectangular pulse trains with constant summed intensity.

    Mode i is ON during slot i of each repetition period. With the default
    duty = 1/n_modes the slots tile the period, so the total beam is exactly
    constant while each mode is a sparse pulse train.
    """

    n_modes: int
    t_rep: int  # ps
    total_rate: float  # counts/s summed over modes
    duty: Optional[float] = None  # defaults to 1/n_modes

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.t_rep <= 0:
            raise ValueError("t_rep must be > 0")
        _require_finite("PulseTrainMultimode", self.total_rate)
        if self.total_rate < 0:
            raise ValueError("total_rate must be >= 0")
        if self.duty is not None:
            _require_finite("PulseTrainMultimode", self.duty)
            if not 0.0 < self.duty <= 1.0:
                raise ValueError("duty must lie in (0, 1]")

    @property
    def duty_cycle(self) -> float:
        return 1.0 / self.n_modes if self.duty is None else self.duty

    @property
    def tiles_exactly(self) -> bool:
        return self.duty is None or abs(self.duty - 1.0 / self.n_modes) < 1e-12


@dataclass(frozen=True)
class LogGaussianCox:
    """Lognormal doubly stochastic intensity with damped-oscillation memory.

    I(t) = mean_rate * exp(sigma*d(t) - sigma^2/2), giving marginal
    log-intensity variance sigma2 and
    g2(tau) = exp(sigma2 * exp(-|tau|/tau_d) * cos(2 pi tau / t_osc)).
    """

    mean_rate: float
    sigma2: float
    tau_d: int  # ps
    t_osc: int  # ps

    def __post_init__(self):
        _require_finite("LogGaussianCox", self.mean_rate, self.sigma2, self.tau_d, self.t_osc)
        if self.mean_rate < 0:
            raise ValueError("mean_rate must be >= 0")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if self.tau_d <= 0 or self.t_osc <= 0:
            raise ValueError("tau_d and t_osc must be > 0")


@dataclass(frozen=True)
class CorrelatedPair:
    """Joint (total, mode) lognormal intensities with tunable cross sign.

    The total beam is driven by a damped-oscillation Gaussian g(t); the mode
    by rho*g(t - delta) + sqrt(1-rho^2)*h(t) with h an independent copy, so
    the cross-covariance of the drivers is exactly
    rho * exp(-|tau-delta|/tau_d) * cos(2 pi (tau-delta)/t_osc).
    rho > 0 realizes the semiclassical co-fluctuation picture; rho < 0 the
    observed anticorrelation. Both marginals share tau_d and t_osc.
    """

    total: LogGaussianCox
    mode: LogGaussianCox
    rho: float
    delta: int = 0  # ps; mode features lag the total beam by this much

    def __post_init__(self):
        if not isinstance(self.total, LogGaussianCox) or not isinstance(self.mode, LogGaussianCox):
            raise ValueError("CorrelatedPair components must be LogGaussianCox")
        _require_finite("CorrelatedPair", self.rho, self.delta)
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if self.total.tau_d != self.mode.tau_d or self.total.t_osc != self.mode.t_osc:
            raise ValueError("total and mode must share tau_d and t_osc (one driver process)")


SourceModel = Union[Coherent, Chaotic, Modulated, PulseTrainMultimode, LogGaussianCox, CorrelatedPair]


@dataclass(frozen=True)
class IntensityTrace:
    """Sampled classical intensity: piecewise constant, counts/s per dt bin."""

    dt: int  # ps per sample
    samples: np.ndarray  # float64, counts/s
    label: str = "intensity"

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.samples, dtype=np.float64))
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if arr.size and float(arr.min()) < 0:
            raise ValueError("intensity samples must be >= 0")
        if self.dt <= 0:
            raise ValueError("dt must be a positive integer")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def duration(self) -> int:
        return self.dt * self.samples.size

    def mean(self) -> float:
        return float(self.samples.mean()) if self.samples.size else 0.0


def write_trace_csv(trace: IntensityTrace, sink=None) -> str:
    """Debug export: "t_ps,rate_cps" rows at bin left edges."""
    lines = ["t_ps,rate_cps"]
    for k, v in enumerate(trace.samples.tolist()):  # tolist -> python floats
        lines.append(f"{k * trace.dt},{v!r}")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        with open(sink, "w") as fh:
            fh.write(text)
    return text


def min_timescale(model: SourceModel) -> Optional[int]:
    """Fastest time constant that dt must resolve (ps), or None if flat."""
    if isinstance(model, Coherent):
        return None
    if isinstance(model, Chaotic):
        return int(model.tau_c)
    if isinstance(model, Modulated):
        return min_timescale(model.base)
    if isinstance(model, PulseTrainMultimode):
        return max(1, int(model.duty_cycle * model.t_rep))
    if isinstance(model, LogGaussianCox):
        return min(model.tau_d, model.t_osc)
    if isinstance(model, CorrelatedPair):
        return min(model.total.tau_d, model.total.t_osc)
    raise TypeError(f"not a SourceModel: {model!r}")


def _check_sampling(model: SourceModel, duration: int, dt: int) -> int:
    if dt <= 0:
        raise ValueError("dt must be a positive integer")
    if duration < dt:
        raise ValueError("duration must be >= dt")
    if duration % dt:
        raise ValueError("duration must be a whole number of dt bins")
    scale = min_timescale(model)
    if scale is not None and dt * 10 > scale:
        raise DtTooCoarseError(
            f"dt={dt} ps does not resolve the fastest model timescale {scale} ps (need dt <= {scale // 10} ps)"
        )
    return duration // dt


def _bin_center_phase(start_idx: int, n: int, dt: int, period: int) -> np.ndarray:
    """2*pi * frac(t_center / period) via exact integer arithmetic.

    Avoids large-argument trig: t_center = (k + 1/2) dt, reduced modulo the
    period in int64 before any float conversion.
    """
    two_t = (2 * (start_idx + np.arange(n, dtype=np.int64)) + 1) * dt
    return _TWO_PI * ((two_t % (2 * period)) / (2.0 * period))


_TILE_LIMIT = 1 << 16


def _wave_period_samples(dt: int, period: int) -> Optional[int]:
    """Sample count after which bin-center phases repeat exactly, if small."""
    m = period // math.gcd(dt, period)
    return m if m <= _TILE_LIMIT else None


class _WaveTable:
    """cos/sin of the bin-center phase, tiled from one exact period.

    The phase pattern at indices k and k+m is identical in exact integer
    arithmetic when m*dt is a multiple of the period, so tiling reproduces
    the direct per-sample evaluation bit for bit at a fraction of the cost.
    """

    def __init__(self, dt: int, period: int):
        self._dt = dt
        self._period = period
        m = _wave_period_samples(dt, period)
        if m is None:
            self._cos = self._sin = None
            self._m = 0
        else:
            phase = _bin_center_phase(0, m, dt, period)
            self._cos = np.cos(phase)
            self._sin = np.sin(phase)
            self._m = m

    def cos_sin(self, start_idx: int, n: int):
        if self._cos is None:
            phase = _bin_center_phase(start_idx, n, self._dt, self._period)
            return np.cos(phase), np.sin(phase)
        off = start_idx % self._m
        reps = (off + n) // self._m + 1
        c = np.tile(self._cos, reps)[off : off + n]
        s = np.tile(self._sin, reps)[off : off + n]
        return c, s


class _OUChain:
    """Exact-discretization Ornstein-Uhlenbeck sampler with chunk carry-over."""

    def __init__(self, tau_ps: float, dt_ps: int, rng: np.random.Generator):
        phi = math.exp(-dt_ps / tau_ps)
        self._b = np.array([math.sqrt(1.0 - phi * phi)])
        self._a = np.array([1.0, -phi])
        self._zi = np.array([phi * rng.standard_normal()])  # stationary start
        self._rng = rng

    def draw(self, n: int) -> np.ndarray:
        xi = self._rng.standard_normal(n)
        y, self._zi = lfilter(self._b, self._a, xi, zi=self._zi)
        return y


class _DampedOscChain:
    """d(t) = x(t) cos(wt) + y(t) sin(wt); Cov = exp(-|tau|/tau_d) cos(w tau).

    The quadratures get their own generators so the sampled path does not
    depend on how the time axis is chunked.
    """

    def __init__(self, tau_d: int, t_osc: int, dt: int, rng_x, rng_y, start_idx: int = 0):
        self._x = _OUChain(tau_d, dt, rng_x)
        self._y = _OUChain(tau_d, dt, rng_y)
        self._wave = _WaveTable(dt, t_osc)
        self._idx = start_idx

    def draw(self, n: int) -> np.ndarray:
        c, s = self._wave.cos_sin(self._idx, n)
        self._idx += n
        d = self._x.draw(n)
        d *= c
        s = s * self._y.draw(n)
        d += s
        return d


def _iter_chunks(n_total: int, chunk: int) -> Iterator[Tuple[int, int]]:
    start = 0
    while start < n_total:
        n = min(chunk, n_total - start)
        yield start, n
        start += n


def _intensity_chunks(
    model: SourceModel, duration: int, dt: int, seed: int, chunk: int
) -> Iterator[Tuple[int, Tuple[np.ndarray, ...]]]:
    """Yield (start_index, per-output intensity arrays) for consecutive chunks.

    Every stochastic chain draws from its own generator hashed from
    (seed, chain label), so realizations are independent of chunk size.
    """
    n_total = duration // dt

    if isinstance(model, Coherent):
        for start, n in _iter_chunks(n_total, chunk):
            yield start, (np.full(n, float(model.rate)),)

    elif isinstance(model, Chaotic):
        re = _OUChain(model.tau_c, dt, derive_rng(seed, "intensity", "field-re"))
        im = _OUChain(model.tau_c, dt, derive_rng(seed, "intensity", "field-im"))
        for start, n in _iter_chunks(n_total, chunk):
            a = re.draw(n)
            b = im.draw(n)
            yield start, (0.5 * model.rate * (a * a + b * b),)

    elif isinstance(model, Modulated):
        inner = _intensity_chunks(model.base, duration, dt, seed, chunk)
        wave = _WaveTable(dt, model.period)
        for start, (base,) in inner:
            c, _ = wave.cos_sin(start, base.size)
            yield start, (base * (1.0 + model.depth * c),)

    elif isinstance(model, LogGaussianCox):
        sigma = math.sqrt(model.sigma2)
        drv = _DampedOscChain(
            model.tau_d,
            model.t_osc,
            dt,
            derive_rng(seed, "intensity", "drv-x"),
            derive_rng(seed, "intensity", "drv-y"),
        )
        log_mean = math.log(model.mean_rate) - 0.5 * model.sigma2 if model.mean_rate > 0 else None
        for start, n in _iter_chunks(n_total, chunk):
            d = drv.draw(n)
            if log_mean is None:
                yield start, (np.zeros(n),)
            else:
                yield start, (np.exp(sigma * d + log_mean),)

    elif isinstance(model, PulseTrainMultimode):
        offset = int(derive_rng(seed, "intensity", "offset").integers(0, model.t_rep))
        for start, n in _iter_chunks(n_total, chunk):
            total, mode0 = _pulse_train_chunk(model, start, n, dt, offset, mode_index=0)
            yield start, (total, mode0)

    elif isinstance(model, CorrelatedPair):
        lag = abs(int(model.delta))
        if lag % dt:
            raise ValueError("CorrelatedPair delta must be a multiple of dt for sampling")
        lag //= dt
        sig_t = math.sqrt(model.total.sigma2)
        sig_m = math.sqrt(model.mode.sigma2)
        root = math.sqrt(max(0.0, 1.0 - model.rho * model.rho))
        # the delayed output needs `lag` samples of driver history
        g = _DampedOscChain(
            model.total.tau_d,
            model.total.t_osc,
            dt,
            derive_rng(seed, "intensity", "g-x"),
            derive_rng(seed, "intensity", "g-y"),
            start_idx=-lag,
        )
        h = _DampedOscChain(
            model.total.tau_d,
            model.total.t_osc,
            dt,
            derive_rng(seed, "intensity", "h-x"),
            derive_rng(seed, "intensity", "h-y"),
        )
        hist = g.draw(lag) if lag else np.empty(0)
        lm_t = math.log(model.total.mean_rate) - 0.5 * model.total.sigma2
        lm_m = math.log(model.mode.mean_rate) - 0.5 * model.mode.sigma2
        for start, n in _iter_chunks(n_total, chunk):
            g_now = g.draw(n)
            g_seq = np.concatenate([hist, g_now]) if lag else g_now
            delayed = g_seq[:n]
            current = g_now
            if lag:
                hist = g_seq[-lag:]
            d_other = model.rho * delayed + root * h.draw(n)
            if model.delta >= 0:
                d_total, d_mode = current, d_other
            else:
                d_total, d_mode = d_other, current
            yield start, (
                np.exp(sig_t * d_total + lm_t),
                np.exp(sig_m * d_mode + lm_m),
            )

    else:
        raise TypeError(f"not a SourceModel: {model!r}")


def _pulse_train_direct(
    model: PulseTrainMultimode, start: int, n: int, dt: int, offset: int, mode_index: int
) -> Tuple[np.ndarray, np.ndarray]:
    """(total, one mode) intensities over a chunk, pure integer slotting."""
    t = (start + np.arange(n, dtype=np.int64)) * dt  # left edges
    phase = (t - offset) % model.t_rep
    nm = model.n_modes
    if model.tiles_exactly:
        peak = float(model.total_rate)
        slot = (phase * nm) // model.t_rep  # exactly one slot per instant
        total = np.full(n, peak)
        mode = np.where(slot == mode_index, peak, 0.0)
        return total, mode
    width = model.duty_cycle * model.t_rep
    peak = model.total_rate / (nm * model.duty_cycle)
    on_count = np.zeros(n, dtype=np.int64)
    mode = None
    for i in range(nm):
        shifted = (phase - (i * model.t_rep) // nm) % model.t_rep
        on = shifted < width
        on_count += on
        if i == mode_index:
            mode = np.where(on, peak, 0.0)
    return peak * on_count.astype(np.float64), mode


def _pulse_train_chunk(
    model: PulseTrainMultimode, start: int, n: int, dt: int, offset: int, mode_index: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Direct slotting, tiled from one exact repetition period when possible."""
    m = _wave_period_samples(dt, model.t_rep)
    if m is None or m >= n:
        return _pulse_train_direct(model, start, n, dt, offset, mode_index)
    tot_pat, mode_pat = _pulse_train_direct(model, 0, m, dt, offset, mode_index)
    off = start % m
    reps = (off + n) // m + 1
    total = np.tile(tot_pat, reps)[off : off + n]
    mode = np.tile(mode_pat, reps)[off : off + n]
    return total, mode


def pulse_train_mode_traces(
    model: PulseTrainMultimode, duration: int, dt: int, seed: int
) -> list:
    """All per-mode traces of one realization (diagnostic; memory-capped)."""
    n = _check_sampling(model, duration, dt)
    if n * model.n_modes > MAX_TRACE_SAMPLES:
        raise ValueError("requested mode traces exceed the in-memory cap")
    offset = int(derive_rng(seed, "intensity", "offset").integers(0, model.t_rep))
    traces = []
    for i in range(model.n_modes):
        _, mode = _pulse_train_chunk(model, 0, n, dt, offset, mode_index=i)
        traces.append(IntensityTrace(dt, mode, label=f"mode{i}"))
    return traces


_OUTPUT_LABELS = {
    Coherent: ("total",),
    Chaotic: ("total",),
    Modulated: ("lamp",),
    LogGaussianCox: ("mode",),
    PulseTrainMultimode: ("total", "mode"),
    CorrelatedPair: ("total", "mode"),
}


def output_labels(model: SourceModel) -> Tuple[str, ...]:
    return _OUTPUT_LABELS[type(model)]


def sample_intensity(
    model: SourceModel, duration: int, dt: int, seed: int
) -> Union[IntensityTrace, Tuple[IntensityTrace, IntensityTrace]]:
    """Materialize one stationary realization of the model's intensity.

    Deterministic in (model, duration, dt, seed). Dual models
    (CorrelatedPair, PulseTrainMultimode) return (total, mode) traces.
    Requests beyond MAX_TRACE_SAMPLES are rejected; use sample_photons,
    which streams in bounded chunks, for long acquisitions.
    """
    n = _check_sampling(model, duration, dt)
    labels = output_labels(model)
    if n * len(labels) > MAX_TRACE_SAMPLES:
        raise ValueError(
            f"trace of {n} samples x {len(labels)} outputs exceeds the in-memory cap; "
            "use sample_photons for long acquisitions"
        )
    parts = [[] for _ in labels]
    for _, arrays in _intensity_chunks(model, duration, dt, seed, CHUNK_SAMPLES):
        for acc, arr in zip(parts, arrays):
            acc.append(arr)
    traces = tuple(
        IntensityTrace(dt, np.concatenate(chunks) if chunks else np.empty(0), label=lab)
        for chunks, lab in zip(parts, labels)
    )
    return traces if len(traces) > 1 else traces[0]


def _place_photons(
    w: np.ndarray, dt: int, start_idx: int, rng: np.random.Generator
) -> np.ndarray:
    """Tags for one chunk given per-bin Poisson means w (sorted int64 ps)."""
    if float(w.max(initial=0.0)) > MAX_BIN_MEAN:
        raise PhotonBudgetError("per-bin expected count exceeds the sampler budget")
    total = float(w.sum())
    if total > MAX_BIN_MEAN:
        raise PhotonBudgetError("expected photon count per chunk exceeds the sampler budget")
    n = int(rng.poisson(total)) if total > 0 else 0
    if n == 0:
        return np.empty(0, dtype=np.int64)
    u = np.sort(rng.random(n)) * total
    cum = np.cumsum(w)
    k = np.searchsorted(cum, u, side="right")
    k = np.minimum(k, w.size - 1)
    frac = (u - (cum[k] - w[k])) / w[k]
    frac = np.clip(frac, 0.0, np.nextafter(1.0, 0.0))
    return (np.int64(start_idx) + k) * dt + np.floor(frac * dt).astype(np.int64)


def photonize(trace: IntensityTrace, seed: int, channel: int = 0) -> TagStream:
    """Inhomogeneous Poisson tags from a trace: per-bin Poisson counts with
    uniform placement inside each bin (sampled by total-count + inverse CDF,
    which is the same law). Deterministic in (trace, seed)."""
    rng = derive_rng(seed, "photonize", trace.label)
    w = trace.samples * (trace.dt * _PS)
    t = _place_photons(w, trace.dt, 0, rng)
    ch = np.full(t.size, channel, dtype=np.uint8)
    return TagStream(
        1,
        max(1, trace.duration),
        {channel},
        t,
        ch,
        provenance=(f"photonize(label={trace.label}, seed={seed})",),
    )


def sample_photons(
    model: SourceModel,
    duration: int,
    dt: int,
    seed: int,
    channel: Union[int, Tuple[int, ...]] = 0,
    rate_scale: Union[float, Tuple[float, ...]] = 1.0,
) -> Union[TagStream, Tuple[TagStream, ...]]:
    """Sample intensity and photonize in bounded chunks (fused pipeline).

    Equivalent in law to photonize(sample_intensity(...)) but streams, so
    arbitrarily long acquisitions run in constant memory. ``rate_scale``
    multiplies the intensity (losses between source and detection fold in
    here). Dual models return one stream per output.
    """
    n_total = _check_sampling(model, duration, dt)
    labels = output_labels(model)
    chans = (channel,) * len(labels) if isinstance(channel, int) else tuple(channel)
    scales = (
        (float(rate_scale),) * len(labels)
        if isinstance(rate_scale, (int, float))
        else tuple(float(s) for s in rate_scale)
    )
    if len(chans) != len(labels) or len(scales) != len(labels):
        raise ValueError(f"model has outputs {labels}; channel/rate_scale must match")
    rng_ph = [derive_rng(seed, "photons", lab) for lab in labels]
    parts = [[] for _ in labels]
    for start, arrays in _intensity_chunks(model, duration, dt, seed, CHUNK_SAMPLES):
        for acc, arr, s, rng in zip(parts, arrays, scales, rng_ph):
            w = arr * (s * dt * _PS)
            acc.append(_place_photons(w, dt, start, rng))
    streams = []
    for chunks, ch, lab in zip(parts, chans, labels):
        t = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        streams.append(
            TagStream(
                1,
                duration,
                {ch},
                t,
                np.full(t.size, ch, dtype=np.uint8),
                provenance=(f"{type(model).__name__}[{lab}] seed={seed}",),
            )
        )
    return tuple(streams) if len(streams) > 1 else streams[0]


def _pulse_overlap(tau: np.ndarray, period: float, width: float) -> np.ndarray:
    """Circular self-overlap length of a width-`width` pulse at lag tau."""
    ph = np.mod(tau, period)
    return np.maximum(0.0, width - ph) + np.maximum(0.0, ph - (period - width))


def analytic_g2(model: SourceModel, which: str, tau) -> Union[float, np.ndarray]:
    """Exact ensemble g2(tau) for the requested correlator kind.

    ``which`` is one of "auto-total", "auto-mode", "cross". Lags in ps.
    Kinds a model does not define raise UnsupportedCorrelatorKindError.
    For Modulated sources the value is the time-averaged g2 an experiment
    measures over whole modulation periods.
    """
    tau_arr = np.asarray(tau, dtype=np.float64)
    scalar = np.isscalar(tau) or tau_arr.ndim == 0
    t = np.atleast_1d(tau_arr)

    def done(vals):
        return float(vals[0]) if scalar else vals

    if which not in ("auto-total", "auto-mode", "cross"):
        raise ValueError(f"unknown correlator kind {which!r}")

    if isinstance(model, Coherent):
        if which == "auto-total":
            return done(np.ones_like(t))
    elif isinstance(model, Chaotic):
        if which == "auto-total":
            return done(1.0 + np.exp(-2.0 * np.abs(t) / model.tau_c))
    elif isinstance(model, Modulated):
        if which == "auto-total":
            base = analytic_g2(model.base, "auto-total", t)
            env = 1.0 + 0.5 * model.depth**2 * np.cos(_TWO_PI * t / model.period)
            return done(np.atleast_1d(base) * env)
    elif isinstance(model, LogGaussianCox):
        if which == "auto-mode":
            damp = np.exp(-np.abs(t) / model.tau_d) * np.cos(_TWO_PI * t / model.t_osc)
            return done(np.exp(model.sigma2 * damp))
    elif isinstance(model, PulseTrainMultimode):
        d = model.duty_cycle
        if which == "auto-total":
            if model.tiles_exactly:
                return done(np.ones_like(t))
            # n staggered duty-d trains: the instantaneous on-count only takes
            # two adjacent integer values; its variance is f(1-f) with
            # f = frac(n*d)
            f = (model.n_modes * d) % 1.0
            return done(np.full_like(t, 1.0 + f * (1.0 - f) / (model.n_modes * d) ** 2))
        if which == "auto-mode":
            width = d * model.t_rep
            return done(_pulse_overlap(t, float(model.t_rep), width) * model.t_rep / width**2)
        if which == "cross" and model.tiles_exactly:
            return done(np.ones_like(t))  # constant total beam
    elif isinstance(model, CorrelatedPair):
        w = _TWO_PI / model.total.t_osc
        if which == "auto-total":
            damp = np.exp(-np.abs(t) / model.total.tau_d) * np.cos(w * t)
            return done(np.exp(model.total.sigma2 * damp))
        if which == "auto-mode":
            damp = np.exp(-np.abs(t) / model.mode.tau_d) * np.cos(w * t)
            return done(np.exp(model.mode.sigma2 * damp))
        if which == "cross":
            shifted = t - model.delta
            damp = np.exp(-np.abs(shifted) / model.total.tau_d) * np.cos(w * shifted)
            amp = math.sqrt(model.total.sigma2 * model.mode.sigma2) * model.rho
            return done(np.exp(amp * damp))
    else:
        raise TypeError(f"not a SourceModel: {model!r}")
    raise UnsupportedCorrelatorKindError(
        f"{type(model).__name__} does not define the {which!r} correlator"
    )
