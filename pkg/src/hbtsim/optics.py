"""Stream-to-stream transforms for the simulated optical bench.

Beamsplitters route each tag independently (valid for every classical,
conditionally-Poisson source in this package: given the intensity, the two
outputs of a splitter are independent Poisson processes). Attenuators are
Bernoulli survival. Detectors apply, in order: efficiency thinning,
Gaussian timestamp jitter (with re-sort; tags jittered outside the
acquisition window are dropped), Poisson dark counts, and non-paralyzable
dead time. No interference, afterpulsing, or detection back-action is
modeled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .sources import derive_rng
from .tags import StreamError, TagStream

_MAX_T = np.iinfo(np.int64).max
_PS = 1e-12


@dataclass(frozen=True)
class DetectorModel:
    """SPAD imperfections; the default is an ideal click detector."""

    efficiency: float = 1.0
    dead_time: int = 0  # ps
    dark_rate: float = 0.0  # counts/s
    jitter_sigma: int = 0  # ps rms

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if self.dead_time < 0:
            raise ValueError("dead_time must be >= 0")
        if self.dark_rate < 0:
            raise ValueError("dark_rate must be >= 0")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")

    @property
    def ideal(self) -> bool:
        return (
            self.efficiency == 1.0
            and self.dead_time == 0
            and self.dark_rate == 0.0
            and self.jitter_sigma == 0
        )


def relabel(s: TagStream, channel: int) -> TagStream:
    """All tags moved onto one detector channel (bench wiring helper)."""
    ch = np.full(len(s), channel, dtype=np.uint8)
    return TagStream(s.resolution, s.duration, {channel}, s.t, ch, s.provenance)


def split(s: TagStream, ratio: float, seed: int) -> tuple:
    """Beamsplitter: each tag goes to output A with probability ``ratio``.

    Tag multiset is conserved exactly: |A| + |B| = |s| for every seed.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("split ratio must lie in [0, 1]")
    rng = derive_rng(seed, "split")
    to_a = rng.random(len(s)) < ratio
    a = TagStream(s.resolution, s.duration, s.channels, s.t[to_a], s.channel[to_a], s.provenance)
    b = TagStream(s.resolution, s.duration, s.channels, s.t[~to_a], s.channel[~to_a], s.provenance)
    return a, b


def delay(s: TagStream, delta: int) -> TagStream:
    """Propagation delay: timestamps shifted by +delta, duration extended."""
    delta = int(delta)
    if delta < 0:
        raise ValueError("delay must be >= 0")
    if delta == 0:
        return s
    if len(s) and int(s.t[-1]) > _MAX_T - delta:
        raise StreamError("delay overflows the timestamp range")
    return TagStream(s.resolution, s.duration + delta, s.channels, s.t + delta, s.channel, s.provenance)


def attenuate(s: TagStream, transmission: float, seed: int) -> TagStream:
    """Neutral-density filter: independent Bernoulli survival per tag."""
    if not 0.0 <= transmission <= 1.0:
        raise ValueError("transmission must lie in [0, 1]")
    if transmission == 1.0:
        return s
    rng = derive_rng(seed, "attenuate")
    keep = rng.random(len(s)) < transmission
    return TagStream(s.resolution, s.duration, s.channels, s.t[keep], s.channel[keep], s.provenance)


def detect(s: TagStream, d: DetectorModel, seed: int) -> TagStream:
    """Detector response, applied independently per channel present."""
    if d.ideal:
        return s
    rng = derive_rng(seed, "detect")
    parts_t = []
    parts_c = []
    for ch in sorted(s.channels):
        t = s.select(ch)
        if d.efficiency < 1.0:
            t = t[rng.random(t.size) < d.efficiency]
        if d.jitter_sigma > 0:
            t = t + np.rint(rng.normal(0.0, d.jitter_sigma, t.size)).astype(np.int64)
            t = np.sort(t[(t >= 0) & (t < s.duration)])
        if d.dark_rate > 0:
            n_dark = rng.poisson(d.dark_rate * s.duration * _PS)
            dark = rng.integers(0, s.duration, n_dark)
            t = np.sort(np.concatenate([t, dark]))
        if d.dead_time > 0 and t.size:
            t = t[_kernels.dead_time_prune(np.ascontiguousarray(t), d.dead_time)]
        parts_t.append(t)
        parts_c.append(np.full(t.size, ch, dtype=np.uint8))
    t_all = np.concatenate(parts_t) if parts_t else np.empty(0, np.int64)
    c_all = np.concatenate(parts_c) if parts_c else np.empty(0, np.uint8)
    order = np.lexsort((c_all, t_all))
    return TagStream(
        s.resolution,
        s.duration,
        s.channels,
        t_all[order],
        c_all[order],
        s.provenance + (f"detect(eff={d.efficiency}, dead={d.dead_time}, seed={seed})",),
    )
