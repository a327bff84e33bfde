"""Bench transforms: conservation, equivariance, detector imperfections."""

import math

import numpy as np
import pytest

from hbtsim import optics
from hbtsim.correlator import CorrelogramSpec, correlate
from hbtsim.optics import DetectorModel
from hbtsim.sources import Coherent, LogGaussianCox, sample_photons
from hbtsim.tags import StreamError, TagStream, merge


def stream_of(t, duration=None, channel=0):
    t = np.asarray(sorted(t), dtype=np.int64)
    if duration is None:
        duration = int(t.max()) + 1 if t.size else 1
    return TagStream(1, duration, {channel}, t, np.full(t.size, channel, np.uint8))


@pytest.fixture(scope="module")
def poisson_stream():
    return sample_photons(Coherent(1e6), duration=10**10, dt=10**7, seed=42)


class TestSplit:
    def test_ratio_one_keeps_all(self, poisson_stream):
        a, b = optics.split(poisson_stream, 1.0, seed=1)
        assert a == poisson_stream and len(b) == 0

    def test_binomial_counts(self, poisson_stream):
        a, b = optics.split(poisson_stream, 0.5, seed=2)
        n = len(poisson_stream)
        assert len(a) + len(b) == n
        assert abs(len(a) - n / 2) < 4 * math.sqrt(n * 0.25)

    def test_split_then_merge_restores_multiset(self):
        s = stream_of([3, 3, 7, 9, 20], duration=30)
        a, b = optics.split(s, 0.4, seed=3)
        assert merge(a, b) == s

    def test_invalid_ratio(self, poisson_stream):
        with pytest.raises(ValueError):
            optics.split(poisson_stream, 1.5, seed=1)


class TestDelay:
    def test_zero_is_identity(self, poisson_stream):
        assert optics.delay(poisson_stream, 0) is poisson_stream

    def test_forced_example(self):
        s = stream_of([10, 20], duration=30)
        d = optics.delay(s, 40_000)
        assert d.t.tolist() == [40_010, 40_020]
        assert d.duration == 30 + 40_000

    def test_overflow_rejected(self):
        s = TagStream(1, 2**62, {0}, [2**62 - 1], [0])
        with pytest.raises(StreamError):
            optics.delay(s, 2**62 + 4096)

    def test_correlator_equivariance(self):
        rng = np.random.default_rng(5)
        dur = 10**8
        a = stream_of(rng.integers(0, dur, 3_000), dur)
        b = stream_of(rng.integers(0, dur, 3_000), dur, channel=1)
        delta = 25_000
        spec = CorrelogramSpec(1_000, -50_000, 50_000)
        shifted = CorrelogramSpec(1_000, -50_000 + delta, 50_000 + delta)
        c_ref = correlate(a, b, spec)
        c_del = correlate(a, optics.delay(b, delta), shifted)
        assert np.array_equal(c_ref.counts, c_del.counts)

    def test_self_delay_peak(self):
        rng = np.random.default_rng(6)
        t = np.unique(rng.integers(0, 10**9, 400))
        a = stream_of(t, duration=2 * 10**9)
        d = optics.relabel(optics.delay(a, 40_000), 1)
        d = TagStream(1, a.duration, d.channels, d.t, d.channel)  # same window
        c = correlate(a, d, CorrelogramSpec(1_000, 0, 100_000))
        assert int(np.argmax(c.counts)) == c.bin_index(40_000)


class TestAttenuate:
    def test_identity_and_empty(self, poisson_stream):
        assert optics.attenuate(poisson_stream, 1.0, seed=1) is poisson_stream
        assert len(optics.attenuate(poisson_stream, 0.0, seed=1)) == 0

    def test_survival_fraction(self, poisson_stream):
        out = optics.attenuate(poisson_stream, 0.3, seed=7)
        n = len(poisson_stream)
        assert abs(len(out) - 0.3 * n) < 4 * math.sqrt(n * 0.3 * 0.7)

    def test_g2_loss_invariance(self):
        # normalized g2 is unchanged by attenuation (key estimator property)
        model = LogGaussianCox(mean_rate=2e6, sigma2=math.log(6.0), tau_d=190_000, t_osc=40_000)
        parent = sample_photons(model, duration=25_000_000_000, dt=4_000, seed=8)
        a, b = optics.split(parent, 0.5, seed=9)
        a, b = optics.relabel(a, 0), optics.relabel(b, 1)
        spec = CorrelogramSpec(4_000, -200_000, 200_000)
        full = correlate(a, b, spec)
        att_a = optics.attenuate(a, 0.4, seed=10)
        att_b = optics.attenuate(b, 0.4, seed=11)
        thin = correlate(att_a, att_b, spec)
        ok = (full.counts > 0) & (thin.counts > 0)
        z = (full.g2[ok] - thin.g2[ok]) / np.hypot(full.g2_err[ok], thin.g2_err[ok])
        assert np.abs(z).max() < 4.0  # 3 sigma nominal + shared-noise slack


class TestDetect:
    def test_ideal_is_identity(self, poisson_stream):
        assert optics.detect(poisson_stream, DetectorModel(), seed=1) is poisson_stream

    def test_dead_time_forced_example(self):
        s = stream_of([0, 1_000, 2_000], duration=10_000)
        out = optics.detect(s, DetectorModel(dead_time=1_500), seed=1)
        assert out.t.tolist() == [0, 2_000]

    def test_dead_time_min_gap_property(self):
        rng = np.random.default_rng(12)
        s = stream_of(np.sort(rng.integers(0, 100_000, 2_000)), duration=100_000)
        out = optics.detect(s, DetectorModel(dead_time=37), seed=2)
        assert len(out) <= len(s)
        assert np.all(np.diff(out.t) >= 37)

    def test_dark_counts_on_empty_stream(self):
        # 100 c/s over 1000 s -> 1e5 +- 1.3e3 (4 sigma)
        s = TagStream(1, 10**15, {0}, [], [])
        out = optics.detect(s, DetectorModel(dark_rate=100.0), seed=3)
        assert abs(len(out) - 100_000) < 1_300

    def test_efficiency_thinning(self, poisson_stream):
        out = optics.detect(poisson_stream, DetectorModel(efficiency=0.25), seed=4)
        n = len(poisson_stream)
        assert abs(len(out) - 0.25 * n) < 4 * math.sqrt(n * 0.25 * 0.75)

    def test_jitter_keeps_sorted(self, poisson_stream):
        out = optics.detect(poisson_stream, DetectorModel(jitter_sigma=500), seed=5)
        assert np.all(np.diff(out.t) >= 0)
        assert len(out) <= len(poisson_stream)  # boundary spills dropped
        assert len(out) > 0.999 * len(poisson_stream)

    def test_determinism(self, poisson_stream):
        d = DetectorModel(efficiency=0.8, dead_time=100, dark_rate=50.0, jitter_sigma=200)
        assert optics.detect(poisson_stream, d, seed=6) == optics.detect(poisson_stream, d, seed=6)

    def test_detector_validation(self):
        with pytest.raises(ValueError):
            DetectorModel(efficiency=1.2)
        with pytest.raises(ValueError):
            DetectorModel(dead_time=-1)
