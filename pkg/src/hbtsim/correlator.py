"""Second-order correlation estimation between two tag channels.

The estimator histograms all ordered tag pairs (multi-start/multi-stop)
whose lag t_b - t_a falls inside the requested window, then normalizes
with the stationary identity

    g2[k] = counts[k] * dur_a * dur_b / (n_a * n_b * bin_width * L_eff[k])

where L_eff[k] is the per-bin effective overlap duration (edge-corrected,
so the long-lag baseline stays at 1 even for windows comparable to the
acquisition time). Error bars are Poisson: g2_err = g2 / sqrt(counts).

``correlate`` runs the optimized sweep (compiled kernel or numpy
fallback, selected in ``_kernels``); ``correlate_brute`` is the
independent O(N^2) oracle that enumerates every pair.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels
from .tags import ResolutionMismatchError, TagStream

# Tags per work unit for the sweep; fixed (not thread-count dependent) so
# partial histograms sum identically for any parallelism.
_CHUNK_TAGS = 1 << 20


def thread_count() -> int:
    """Worker cap from HBT_THREADS (default 1). Results never depend on it."""
    raw = os.environ.get("HBT_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("HBT_THREADS must be >= 1")
    return n


@dataclass(frozen=True)
class CorrelogramSpec:
    """Lag-axis layout: half-open bins [tau_min + k*bw, tau_min + (k+1)*bw)."""

    bin_width: int
    tau_min: int
    tau_max: int

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        if self.tau_min >= self.tau_max:
            raise ValueError("tau_min must be < tau_max")
        if (self.tau_max - self.tau_min) % self.bin_width:
            raise ValueError("(tau_max - tau_min) must be a multiple of bin_width")

    @property
    def n_bins(self) -> int:
        return (self.tau_max - self.tau_min) // self.bin_width

    @property
    def edges(self) -> np.ndarray:
        return self.tau_min + self.bin_width * np.arange(self.n_bins + 1, dtype=np.int64)

    @property
    def centers(self) -> np.ndarray:
        return self.tau_min + self.bin_width * (np.arange(self.n_bins) + 0.5)

    def mirrored(self) -> "CorrelogramSpec":
        """Spec whose bins hold exactly the negated integer lags of this one.

        Timestamps are integers, so bin k's lag set {x .. x+bw-1} mirrors to
        {-x-bw+1 .. -x+1-1}; hence the +1 on both window ends. Satisfies
        correlate(a, b, s).counts == correlate(b, a, s.mirrored()).counts[::-1]
        bit-exactly.
        """
        return CorrelogramSpec(self.bin_width, -self.tau_max + 1, -self.tau_min + 1)


@dataclass(frozen=True)
class CorrelogramMeta:
    n_a: int
    n_b: int
    duration: int  # overlap of the two acquisition windows, ps
    channels: tuple
    dur_a: int = 0
    dur_b: int = 0
    empty_input: bool = False


@dataclass(frozen=True)
class Correlogram:
    spec: CorrelogramSpec
    counts: np.ndarray
    g2: np.ndarray
    g2_err: np.ndarray
    meta: CorrelogramMeta

    @property
    def tau(self) -> np.ndarray:
        return self.spec.centers

    @property
    def empty_bins(self) -> np.ndarray:
        return self.counts == 0

    def bin_index(self, tau: float) -> int:
        k = int((tau - self.spec.tau_min) // self.spec.bin_width)
        if not 0 <= k < self.spec.n_bins:
            raise ValueError(f"lag {tau} ps outside the correlogram window")
        return k


def _overlap_len(tau, dur_a: int, dur_b: int):
    """L(tau): ticks t_a with t_a in [0, dur_a) and t_a + tau in [0, dur_b).

    Piecewise linear in tau with integer kinks; for integer inputs below
    2**53 every evaluation is exact in float64.
    """
    tau = np.asarray(tau, dtype=np.float64)
    upper = np.minimum(float(dur_a), dur_b - tau)
    lower = np.maximum(0.0, -tau)
    return np.maximum(0.0, upper - lower)


def _effective_durations(spec: CorrelogramSpec, dur_a: int, dur_b: int) -> np.ndarray:
    """Mean of L over the integer lags of each bin (exact arithmetic series).

    Averaging over the bin's integer lag set (not the continuous interval)
    matches E[counts] for integer-tick tags exactly and makes the reversed
    correlogram normalization bit-identical.
    """
    edges = spec.edges
    first = edges[:-1]
    last = edges[1:] - 1
    eff = 0.5 * (_overlap_len(first, dur_a, dur_b) + _overlap_len(last, dur_a, dur_b))
    kinks = sorted({-dur_a, min(0, dur_b - dur_a), max(0, dur_b - dur_a), dur_b})
    for bp in kinks:
        k = int(np.searchsorted(edges, bp, side="right")) - 1
        if 0 <= k < spec.n_bins and first[k] < bp < last[k]:
            splits = [int(first[k])] + [b for b in kinks if first[k] < b < last[k]] + [int(last[k])]
            total = 0.0
            for x0, x1 in zip(splits[:-1], splits[1:]):
                l0 = float(_overlap_len(x0, dur_a, dur_b))
                l1 = float(_overlap_len(x1, dur_a, dur_b))
                total += 0.5 * (x1 - x0 + 1) * (l0 + l1)
            for b in splits[1:-1]:  # interior split points were summed twice
                total -= float(_overlap_len(b, dur_a, dur_b))
            eff[k] = total / spec.bin_width
    return eff


def _resolve_channel(s: TagStream, channel: Optional[int], which: str) -> int:
    if channel is not None:
        return channel
    if len(s.channels) == 1:
        return next(iter(s.channels))
    raise ValueError(f"stream {which} holds several channels; pass channel_{which}")


def _normalize(
    spec: CorrelogramSpec,
    counts: np.ndarray,
    n_a: int,
    n_b: int,
    dur_a: int,
    dur_b: int,
    chans: tuple,
) -> Correlogram:
    g2 = np.zeros(spec.n_bins, dtype=np.float64)
    g2_err = np.zeros(spec.n_bins, dtype=np.float64)
    empty = n_a == 0 or n_b == 0
    if not empty:
        eff = _effective_durations(spec, dur_a, dur_b)
        ok = eff > 0
        scale = (float(dur_a) * float(dur_b)) / (float(n_a) * float(n_b) * float(spec.bin_width))
        g2[ok] = counts[ok] * (scale / eff[ok])
        nz = ok & (counts > 0)
        g2_err[nz] = g2[nz] / np.sqrt(counts[nz])
    g2.flags.writeable = False
    g2_err.flags.writeable = False
    counts.flags.writeable = False
    meta = CorrelogramMeta(
        n_a=n_a,
        n_b=n_b,
        duration=min(dur_a, dur_b),
        channels=chans,
        dur_a=dur_a,
        dur_b=dur_b,
        empty_input=empty,
    )
    return Correlogram(spec, counts, g2, g2_err, meta)


def _extract(a: TagStream, b: TagStream, channel_a, channel_b):
    if a.resolution != b.resolution:
        raise ResolutionMismatchError(
            f"streams have different resolutions ({a.resolution} vs {b.resolution} ps)"
        )
    ch_a = _resolve_channel(a, channel_a, "a")
    ch_b = _resolve_channel(b, channel_b, "b")
    ta = a.select(ch_a)
    tb = b.select(ch_b)
    same = ch_a == ch_b and (a is b or np.array_equal(ta, tb))
    return ta, tb, ch_a, ch_b, same


def correlate(
    a: TagStream,
    b: TagStream,
    spec: CorrelogramSpec,
    channel_a: Optional[int] = None,
    channel_b: Optional[int] = None,
    threads: Optional[int] = None,
) -> Correlogram:
    """Estimate g2 between channel_a of ``a`` and channel_b of ``b``.

    O(N*W) two-pointer sweep over the sorted tag arrays (W = mean tags per
    lag window). Self-pairs are excluded when both sides are the same
    physical tag sequence. The sweep is partitioned into fixed-size chunks
    whose int64 partial histograms are summed in order, so the result is
    bit-identical for any thread count.
    """
    ta, tb, ch_a, ch_b, same = _extract(a, b, channel_a, channel_b)
    n_workers = thread_count() if threads is None else max(1, int(threads))
    counts = np.zeros(spec.n_bins, dtype=np.int64)
    spans = [(s, min(s + _CHUNK_TAGS, ta.size)) for s in range(0, ta.size, _CHUNK_TAGS)]

    def run(span):
        s, e = span
        return _kernels.pair_histogram(
            ta[s:e], tb, spec.tau_min, spec.tau_max, spec.bin_width, same, s
        )

    if len(spans) <= 1 or n_workers == 1:
        for span in spans:
            counts += run(span)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for part in pool.map(run, spans):
                counts += part
    return _normalize(spec, counts, ta.size, tb.size, a.duration, b.duration, (ch_a, ch_b))


def correlate_brute(
    a: TagStream,
    b: TagStream,
    spec: CorrelogramSpec,
    channel_a: Optional[int] = None,
    channel_b: Optional[int] = None,
) -> Correlogram:
    """Oracle with the identical contract, by exhaustive enumeration.

    Every ordered pair (i, j) is materialized row by row; no shared logic
    with the sweep kernels. Quadratic: intended for tests and small inputs.
    """
    ta, tb, ch_a, ch_b, same = _extract(a, b, channel_a, channel_b)
    counts = np.zeros(spec.n_bins, dtype=np.int64)
    ks = []
    for i in range(ta.size):
        lag = tb - ta[i]
        valid = (lag >= spec.tau_min) & (lag < spec.tau_max)
        if same:
            valid[i] = False
        if valid.any():
            ks.append((lag[valid] - spec.tau_min) // spec.bin_width)
    if ks:
        counts += np.bincount(np.concatenate(ks), minlength=spec.n_bins).astype(np.int64)
    return _normalize(spec, counts, ta.size, tb.size, a.duration, b.duration, (ch_a, ch_b))


def write_correlogram_csv(c: Correlogram, sink=None) -> str:
    """CSV form "tau_ps,counts,g2,g2_err" (tau at bin centers).

    Floats are written with repr (shortest round-trip), so identical
    correlograms serialize to identical bytes.
    """
    lines = ["tau_ps,counts,g2,g2_err"]
    tau = c.tau.tolist()
    counts = c.counts.tolist()
    g2 = c.g2.tolist()
    g2_err = c.g2_err.tolist()
    for k in range(c.spec.n_bins):
        lines.append(f"{tau[k]!r},{counts[k]},{g2[k]!r},{g2_err[k]!r}")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        if isinstance(sink, str) or hasattr(sink, "__fspath__"):
            with open(sink, "w") as fh:
                fh.write(text)
        else:
            sink.write(text)
    return text


def read_correlogram_csv(source: Union[str, "os.PathLike"]) -> Correlogram:
    """Load a correlogram CSV written by this package.

    The spec is reconstructed from the bin centers; meta counts are not
    stored in the CSV and come back as zeros (enough for fitting, which
    needs tau, g2, g2_err and the empty-bin mask).
    """
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source) as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "tau_ps,counts,g2,g2_err":
        raise ValueError('correlogram CSV must start with "tau_ps,counts,g2,g2_err"')
    rows = [ln.split(",") for ln in lines[1:]]
    tau = np.array([float(r[0]) for r in rows])
    counts = np.array([int(r[1]) for r in rows], dtype=np.int64)
    g2 = np.array([float(r[2]) for r in rows])
    g2_err = np.array([float(r[3]) for r in rows])
    if tau.size < 1:
        raise ValueError("correlogram CSV holds no bins")
    if tau.size == 1:
        bw = max(1, int(round(2 * abs(tau[0]))))
    else:
        bw = int(round(tau[1] - tau[0]))
    tau_min = int(round(tau[0] - bw / 2))
    spec = CorrelogramSpec(bw, tau_min, tau_min + bw * tau.size)
    meta = CorrelogramMeta(n_a=0, n_b=0, duration=0, channels=(-1, -1), empty_input=False)
    return Correlogram(spec, counts, g2, g2_err, meta)
