"""Declarative experiment scenarios and the end-to-end pipeline.

A scenario describes: a light source (or one independent source per bench
arm), the bench (splitters, filter, arm-2 propagation delay, detector
models), the acquisition length, which correlograms to histogram, and
which analyses to run on them. ``run_scenario`` executes
sample -> photonize -> bench -> correlate -> analyses deterministically
from the config seed and writes a single multi-channel .ptt stream, one
CSV per correlogram, and a JSON report.

Channel convention: D1=0, D2=1 (arm 1, total beam), D3=2, D4=3 (arm 2,
spectrally selected mode). The spectrometer's mode selection happens at
the source level: a post-hoc spectral filter on a classical intensity
point process is physically meaningless, so dual-output models emit the
total and mode intensities jointly and each arm is photonized from its
own intensity (exactly the conditional-Poisson law a splitter produces).

The builtin scenarios reproduce the target phenomenology at desk scale.
Acquisition lengths for the fluctuating-intensity sources are rate-scaled:
detected rates are raised and durations shortened at fixed r^2*T, which
leaves every per-bin counting statistic unchanged while keeping the
nanosecond-resolved intensity sampling tractable.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np

from . import analysis as ana
from . import optics, sources
from .correlator import Correlogram, CorrelogramSpec, correlate, write_correlogram_csv
from .optics import DetectorModel
from .sources import SourceModel
from .tags import TagStream, merge, write_stream

DETECTOR_CHANNELS = {"d1": 0, "d2": 1, "d3": 2, "d4": 3}
_CHANNEL_NAMES = {v: k for k, v in DETECTOR_CHANNELS.items()}

DEFAULT_SPEC = CorrelogramSpec(bin_width=1_000, tau_min=-500_000, tau_max=500_000)


class ConfigError(ValueError):
    """Scenario configuration is malformed."""


class ScenarioError(RuntimeError):
    """A pipeline stage failed; carries the report with the error entry."""

    def __init__(self, stage: str, cause: Exception, report: dict):
        super().__init__(f"scenario stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.report = report


@dataclass(frozen=True)
class BenchConfig:
    """Fig.-1-style bench: source splitter, NF + Y-splitter to D1/D2 on arm 1,
    delay + Y-splitter to D3/D4 on arm 2."""

    preset: str = "fig1"
    bs_ratio: float = 0.5  # fraction of the source beam into arm 1
    nf_transmission: float = 1.0
    fbs1_ratio: float = 0.5
    fbs2_ratio: float = 0.5
    delay_ps: int = 40_000
    detectors: tuple = ()  # ((name, DetectorModel), ...) for d1..d4 overrides

    def detector(self, name: str) -> DetectorModel:
        for key, model in self.detectors:
            if key == name:
                return model
        return DetectorModel()


@dataclass(frozen=True)
class CorrelogramRequest:
    name: str
    a: str  # detector name, e.g. "d1"
    b: str
    spec: CorrelogramSpec = DEFAULT_SPEC


@dataclass(frozen=True)
class AnalysisRequest:
    kind: str  # peak_stats | fit | antiphase | witness
    params: tuple = ()  # sorted (key, value) pairs

    def get(self, key, default=None):
        return dict(self.params).get(key, default)


def analysis_request(kind: str, **params) -> AnalysisRequest:
    return AnalysisRequest(kind, tuple(sorted(params.items())))


@dataclass(frozen=True)
class ArmSource:
    """One independent source feeding one arm (bypasses the source splitter)."""

    arm: str  # "arm1" | "arm2"
    model: SourceModel
    dt: int


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    source: Union[SourceModel, Tuple[ArmSource, ...]]
    duration: int  # ps
    dt: int  # ps (ignored for per-arm sources, which carry their own)
    seed: int
    bench: BenchConfig = BenchConfig()
    route: Optional[str] = None  # arm for single-output models (default by type)
    correlograms: tuple = ()
    analyses: tuple = ()

    def __post_init__(self):
        names = [c.name for c in self.correlograms]
        if len(set(names)) != len(names):
            raise ConfigError("correlogram names must be unique")
        for c in self.correlograms:
            for det in (c.a, c.b):
                if det not in DETECTOR_CHANNELS:
                    raise ConfigError(f"unknown detector {det!r}")
        longest = self._longest_timescale()
        if longest and self.duration < 100 * longest:
            import warnings

            warnings.warn(
                f"scenario '{self.name}': duration {self.duration} ps is below "
                f"100x the longest model time constant ({longest} ps); "
                "estimates may not self-average",
                stacklevel=2,
            )

    def _longest_timescale(self) -> int:
        models = (
            [s.model for s in self.source]
            if isinstance(self.source, tuple)
            else [self.source]
        )
        longest = 0
        for m in models:
            if isinstance(m, sources.Chaotic):
                longest = max(longest, m.tau_c)
            elif isinstance(m, sources.Modulated):
                longest = max(longest, m.period)
            elif isinstance(m, sources.PulseTrainMultimode):
                longest = max(longest, m.t_rep)
            elif isinstance(m, sources.LogGaussianCox):
                longest = max(longest, m.tau_d, m.t_osc)
            elif isinstance(m, sources.CorrelatedPair):
                longest = max(longest, m.total.tau_d, m.total.t_osc, abs(m.delta))
        return longest


# ---------------------------------------------------------------------------
# config (de)serialization


def _model_to_dict(m: SourceModel) -> dict:
    if isinstance(m, sources.Coherent):
        return {"kind": "coherent", "rate_cps": m.rate}
    if isinstance(m, sources.Chaotic):
        return {"kind": "chaotic", "rate_cps": m.rate, "tau_c_ps": m.tau_c}
    if isinstance(m, sources.Modulated):
        return {
            "kind": "modulated",
            "base": _model_to_dict(m.base),
            "period_ps": m.period,
            "depth": m.depth,
        }
    if isinstance(m, sources.PulseTrainMultimode):
        out = {
            "kind": "pulse_train",
            "n_modes": m.n_modes,
            "t_rep_ps": m.t_rep,
            "total_rate_cps": m.total_rate,
        }
        if m.duty is not None:
            out["duty"] = m.duty
        return out
    if isinstance(m, sources.LogGaussianCox):
        return {
            "kind": "log_gaussian_cox",
            "mean_rate_cps": m.mean_rate,
            "sigma2": m.sigma2,
            "tau_d_ps": m.tau_d,
            "t_osc_ps": m.t_osc,
        }
    if isinstance(m, sources.CorrelatedPair):
        return {
            "kind": "correlated_pair",
            "total": _model_to_dict(m.total),
            "mode": _model_to_dict(m.mode),
            "rho": m.rho,
            "delta_ps": m.delta,
        }
    raise ConfigError(f"unknown source model {m!r}")


def _model_from_dict(d: dict) -> SourceModel:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("source model must be an object with a 'kind'")
    kind = d["kind"]
    try:
        if kind == "coherent":
            return sources.Coherent(rate=d["rate_cps"])
        if kind == "chaotic":
            return sources.Chaotic(rate=d["rate_cps"], tau_c=int(d["tau_c_ps"]))
        if kind == "modulated":
            return sources.Modulated(
                base=_model_from_dict(d["base"]),
                period=int(d["period_ps"]),
                depth=d["depth"],
            )
        if kind == "pulse_train":
            return sources.PulseTrainMultimode(
                n_modes=int(d["n_modes"]),
                t_rep=int(d["t_rep_ps"]),
                total_rate=d["total_rate_cps"],
                duty=d.get("duty"),
            )
        if kind == "log_gaussian_cox":
            return sources.LogGaussianCox(
                mean_rate=d["mean_rate_cps"],
                sigma2=d["sigma2"],
                tau_d=int(d["tau_d_ps"]),
                t_osc=int(d["t_osc_ps"]),
            )
        if kind == "correlated_pair":
            return sources.CorrelatedPair(
                total=_model_from_dict(d["total"]),
                mode=_model_from_dict(d["mode"]),
                rho=d["rho"],
                delta=int(d.get("delta_ps", 0)),
            )
    except KeyError as exc:
        raise ConfigError(f"source model {kind!r} is missing field {exc}") from exc
    raise ConfigError(f"unknown source model kind {kind!r}")


def _detector_from_dict(d: dict) -> DetectorModel:
    return DetectorModel(
        efficiency=d.get("efficiency", 1.0),
        dead_time=int(d.get("dead_time_ps", 0)),
        dark_rate=d.get("dark_rate_cps", 0.0),
        jitter_sigma=int(d.get("jitter_sigma_ps", 0)),
    )


def _detector_to_dict(m: DetectorModel) -> dict:
    return {
        "efficiency": m.efficiency,
        "dead_time_ps": m.dead_time,
        "dark_rate_cps": m.dark_rate,
        "jitter_sigma_ps": m.jitter_sigma,
    }


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    if isinstance(cfg.source, tuple):
        source = {s.arm: {**_model_to_dict(s.model), "dt_ps": s.dt} for s in cfg.source}
    else:
        source = _model_to_dict(cfg.source)
        if cfg.route:
            source["route"] = cfg.route
    return {
        "name": cfg.name,
        "seed": cfg.seed,
        "duration_ps": cfg.duration,
        "dt_ps": cfg.dt,
        "source": source,
        "bench": {
            "preset": cfg.bench.preset,
            "bs_ratio": cfg.bench.bs_ratio,
            "nf_transmission": cfg.bench.nf_transmission,
            "fbs1_ratio": cfg.bench.fbs1_ratio,
            "fbs2_ratio": cfg.bench.fbs2_ratio,
            "delay_ps": cfg.bench.delay_ps,
            "detectors": {k: _detector_to_dict(m) for k, m in cfg.bench.detectors},
        },
        "correlograms": [
            {
                "name": c.name,
                "a": c.a,
                "b": c.b,
                "bin_ps": c.spec.bin_width,
                "tau_min_ps": c.spec.tau_min,
                "tau_max_ps": c.spec.tau_max,
            }
            for c in cfg.correlograms
        ],
        "analyses": [{"kind": a.kind, **dict(a.params)} for a in cfg.analyses],
    }


def scenario_from_dict(d: dict) -> ScenarioConfig:
    try:
        raw_source = d["source"]
        if not isinstance(raw_source, dict):
            raise ConfigError("source must be an object")
        if "kind" in raw_source:
            spec = dict(raw_source)
            route = spec.pop("route", None)
            source: Union[SourceModel, tuple] = _model_from_dict(spec)
        else:
            route = None
            arms = []
            for arm in sorted(raw_source):
                if arm not in ("arm1", "arm2"):
                    raise ConfigError(f"unknown arm {arm!r} (use arm1/arm2)")
                spec = dict(raw_source[arm])
                dt = int(spec.pop("dt_ps", d["dt_ps"]))
                arms.append(ArmSource(arm, _model_from_dict(spec), dt))
            source = tuple(arms)
        bench_d = d.get("bench", {})
        detectors = tuple(
            (k, _detector_from_dict(v)) for k, v in sorted(bench_d.get("detectors", {}).items())
        )
        bench = BenchConfig(
            preset=bench_d.get("preset", "fig1"),
            bs_ratio=bench_d.get("bs_ratio", 0.5),
            nf_transmission=bench_d.get("nf_transmission", 1.0),
            fbs1_ratio=bench_d.get("fbs1_ratio", 0.5),
            fbs2_ratio=bench_d.get("fbs2_ratio", 0.5),
            delay_ps=int(bench_d.get("delay_ps", 40_000)),
            detectors=detectors,
        )
        correlograms = tuple(
            CorrelogramRequest(
                name=c["name"],
                a=c["a"],
                b=c["b"],
                spec=CorrelogramSpec(
                    int(c["bin_ps"]), int(c["tau_min_ps"]), int(c["tau_max_ps"])
                ),
            )
            for c in d.get("correlograms", [])
        )
        analyses = tuple(
            analysis_request(a["kind"], **{k: v for k, v in a.items() if k != "kind"})
            for a in d.get("analyses", [])
        )
        return ScenarioConfig(
            name=d["name"],
            source=source,
            duration=int(d["duration_ps"]),
            dt=int(d["dt_ps"]),
            seed=int(d["seed"]),
            bench=bench,
            route=route,
            correlograms=correlograms,
            analyses=analyses,
        )
    except KeyError as exc:
        raise ConfigError(f"scenario config missing field {exc}") from exc


def load_scenario(path: str) -> ScenarioConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(data)


# ---------------------------------------------------------------------------
# pipeline


_DEFAULT_ROUTE = {
    sources.Coherent: "arm1",
    sources.Chaotic: "arm1",
    sources.Modulated: "arm1",
    sources.LogGaussianCox: "arm2",
}


def _stage_seed(seed: int, label: str) -> int:
    return int(sources.derive_rng(seed, "stage", label).integers(2**63))


def _generate_arm_streams(cfg: ScenarioConfig) -> dict:
    """Photon streams entering each bench arm, keyed "arm1"/"arm2"."""
    bench = cfg.bench
    out = {}
    if isinstance(cfg.source, tuple):
        # independent per-arm sources: the source splitter is not in the
        # path and each arm draws from its own derived seed
        for arm_src in cfg.source:
            stream = sources.sample_photons(
                arm_src.model,
                cfg.duration,
                arm_src.dt,
                _stage_seed(cfg.seed, f"src-{arm_src.arm}"),
                channel=0,
                rate_scale=1.0,
            )
            if isinstance(stream, tuple):
                raise ConfigError("per-arm sources must be single-output models")
            out[arm_src.arm] = stream
        return out
    model = cfg.source
    if isinstance(model, (sources.CorrelatedPair, sources.PulseTrainMultimode)):
        total, mode = sources.sample_photons(
            model,
            cfg.duration,
            cfg.dt,
            _stage_seed(cfg.seed, "src"),
            channel=(0, 0),
            rate_scale=(bench.bs_ratio, 1.0 - bench.bs_ratio),
        )
        out["arm1"] = total
        out["arm2"] = mode
        return out
    route = cfg.route or _DEFAULT_ROUTE[type(model)]
    if route not in ("arm1", "arm2"):
        raise ConfigError(f"route must be arm1 or arm2, not {route!r}")
    scale = bench.bs_ratio if route == "arm1" else 1.0 - bench.bs_ratio
    out[route] = sources.sample_photons(
        model, cfg.duration, cfg.dt, _stage_seed(cfg.seed, "src"), channel=0, rate_scale=scale
    )
    return out


def _run_bench(arm_streams: dict, bench: BenchConfig, seed: int) -> TagStream:
    """Apply the bench transforms and merge the detector outputs."""
    pieces = []
    if "arm1" in arm_streams:
        s = optics.attenuate(arm_streams["arm1"], bench.nf_transmission, _stage_seed(seed, "nf"))
        a, b = optics.split(s, bench.fbs1_ratio, _stage_seed(seed, "fbs1"))
        for det_name, part in (("d1", a), ("d2", b)):
            stream = optics.relabel(part, DETECTOR_CHANNELS[det_name])
            stream = optics.detect(stream, bench.detector(det_name), _stage_seed(seed, f"det-{det_name}"))
            pieces.append(stream)
    if "arm2" in arm_streams:
        s = optics.delay(arm_streams["arm2"], bench.delay_ps)
        a, b = optics.split(s, bench.fbs2_ratio, _stage_seed(seed, "fbs2"))
        for det_name, part in (("d3", a), ("d4", b)):
            stream = optics.relabel(part, DETECTOR_CHANNELS[det_name])
            stream = optics.detect(stream, bench.detector(det_name), _stage_seed(seed, f"det-{det_name}"))
            pieces.append(stream)
    if not pieces:
        raise ConfigError("no bench arm received a source")
    merged = pieces[0]
    for extra in pieces[1:]:
        merged = merge(merged, extra)
    return merged.with_channels(range(4))


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    stream: TagStream
    correlograms: dict
    analyses: dict
    report: dict
    paths: list


def _resolve_zero_lag(value, correlograms: dict) -> float:
    """Witness denominators: an explicit number or "<name>" zero-lag bin."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and value in correlograms:
        c = correlograms[value]
        return float(c.g2[c.bin_index(0)])
    raise ConfigError(f"cannot resolve zero-lag autocorrelation from {value!r}")


def _run_analyses(cfg: ScenarioConfig, correlograms: dict, out_dir, paths) -> dict:
    blocks = {}
    for idx, req in enumerate(cfg.analyses):
        key = f"{req.kind}:{idx}"
        try:
            if req.kind == "peak_stats":
                c = correlograms[req.get("correlogram")]
                blocks[key] = asdict(ana.peak_stats(c))
            elif req.kind == "fit":
                c = correlograms[req.get("correlogram")]
                fit = ana.fit_damped_oscillation(c)
                blocks[key] = asdict(fit)
            elif req.kind == "antiphase":
                x = correlograms[req.get("a")]
                y = correlograms[req.get("b")]
                blocks[key] = {"score": ana.antiphase_score(x, y)}
            elif req.kind == "witness":
                cross = correlograms[req.get("cross")]
                g_ii0 = _resolve_zero_lag(req.get("g_ii0"), correlograms)
                g_vv0 = _resolve_zero_lag(req.get("g_vv0"), correlograms)
                curve = ana.cs_witness(g_ii0, g_vv0, cross)
                block = {
                    "g_ii0": g_ii0,
                    "g_vv0": g_vv0,
                    "max_w": float(curve.w.max()),
                    "max_excess_sigma": float(
                        np.max((curve.w - 1.0) / np.where(curve.w_err > 0, curve.w_err, np.inf))
                    ),
                }
                if out_dir is not None:
                    path = os.path.join(out_dir, f"witness_{req.get('cross')}.csv")
                    ana.write_witness_csv(curve, path)
                    paths.append(path)
                    block["path"] = path
                blocks[key] = block
            else:
                blocks[key] = {"error": f"unknown analysis kind {req.kind!r}"}
        except Exception as exc:  # surfaced per spec: block or error entry
            blocks[key] = {"error": f"{type(exc).__name__}: {exc}"}
    return blocks


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[str] = None) -> ScenarioResult:
    """Execute the full pipeline; deterministic in (config, seed).

    On a stage failure every artifact written so far is removed and a
    ScenarioError carrying the partial report (with the stage name) is
    raised; the CLI writes that report next to the other outputs.
    """
    report = {"name": cfg.name, "seed": cfg.seed, "config": scenario_to_dict(cfg)}
    paths: list = []
    timing = {}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    def fail(stage: str, exc: Exception):
        for p in paths:
            try:
                os.remove(p)
            except OSError:
                pass
        report["error"] = {"stage": stage, "message": f"{type(exc).__name__}: {exc}"}
        raise ScenarioError(stage, exc, report) from exc

    t0 = time.perf_counter()
    try:
        arm_streams = _generate_arm_streams(cfg)
    except Exception as exc:
        fail("sources", exc)
    timing["sources_s"] = round(time.perf_counter() - t0, 3)

    t0 = time.perf_counter()
    try:
        stream = _run_bench(arm_streams, cfg.bench, cfg.seed)
    except Exception as exc:
        fail("bench", exc)
    timing["bench_s"] = round(time.perf_counter() - t0, 3)

    if out_dir is not None:
        path = os.path.join(out_dir, "streams.ptt")
        try:
            write_stream(stream, path)
        except Exception as exc:
            fail("write-streams", exc)
        paths.append(path)
        report["stream_path"] = path
    report["tag_counts"] = {
        _CHANNEL_NAMES.get(ch, str(ch)): n for ch, n in stream.counts_by_channel().items()
    }
    report["tags_total"] = len(stream)

    t0 = time.perf_counter()
    correlograms = {}
    corr_meta = []
    try:
        for req in cfg.correlograms:
            c = correlate(
                stream,
                stream,
                req.spec,
                DETECTOR_CHANNELS[req.a],
                DETECTOR_CHANNELS[req.b],
            )
            correlograms[req.name] = c
            entry = {
                "name": req.name,
                "channels": [req.a, req.b],
                "n_a": c.meta.n_a,
                "n_b": c.meta.n_b,
            }
            if out_dir is not None:
                path = os.path.join(out_dir, f"{req.name}.csv")
                write_correlogram_csv(c, path)
                paths.append(path)
                entry["path"] = path
            corr_meta.append(entry)
    except Exception as exc:
        fail("correlate", exc)
    timing["correlate_s"] = round(time.perf_counter() - t0, 3)
    report["correlograms"] = corr_meta

    t0 = time.perf_counter()
    report["analyses"] = _run_analyses(cfg, correlograms, out_dir, paths)
    timing["analyses_s"] = round(time.perf_counter() - t0, 3)
    report["timing"] = timing

    if out_dir is not None:
        rpath = os.path.join(out_dir, "report.json")
        with open(rpath, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
        paths.append(rpath)
        report["report_path"] = rpath
    return ScenarioResult(cfg, stream, correlograms, report["analyses"], report, paths)


# ---------------------------------------------------------------------------
# builtin scenarios (Figures 2-5 plus the discussion counterfactuals)


def _corr(name, a, b, spec=DEFAULT_SPEC):
    return CorrelogramRequest(name, a, b, spec)


_SECOND = 1_000_000_000_000  # ps

_FIG3_MODE = sources.LogGaussianCox(
    mean_rate=4.0e6, sigma2=math.log(6.0), tau_d=190_000, t_osc=40_000
)


def builtin_scenarios() -> list:
    """The shipped scenario set (see module docstring for rate scaling)."""
    coarse = CorrelogramSpec(50_000, -500_000, 500_000)
    fig2 = ScenarioConfig(
        name="fig2-coherent",
        source=sources.Coherent(rate=8.0e4),
        route="arm1",
        duration=600 * _SECOND,
        dt=1_000_000_000,  # constant intensity: 1 ms bins suffice
        seed=20260201,
        correlograms=(
            _corr("d1xd2", "d1", "d2"),
            _corr("d1xd2_coarse", "d1", "d2", coarse),
        ),
        analyses=(
            analysis_request("peak_stats", correlogram="d1xd2"),
            analysis_request("witness", cross="d1xd2_coarse", g_ii0=1.0, g_vv0=1.0),
        ),
    )

    fig3 = ScenarioConfig(
        name="fig3-singlemode",
        source=_FIG3_MODE,
        route="arm2",
        duration=_SECOND // 8,
        dt=1_000,
        seed=20260302,
        correlograms=(_corr("d3xd4", "d3", "d4"),),
        analyses=(
            analysis_request("peak_stats", correlogram="d3xd4"),
            analysis_request("fit", correlogram="d3xd4"),
            analysis_request("witness", cross="d3xd4", g_ii0=6.0, g_vv0=6.0),
        ),
    )

    pair = sources.CorrelatedPair(
        total=sources.LogGaussianCox(mean_rate=4.0e6, sigma2=0.5, tau_d=190_000, t_osc=40_000),
        mode=sources.LogGaussianCox(mean_rate=4.0e6, sigma2=math.log(6.0), tau_d=190_000, t_osc=40_000),
        rho=-0.9,
        delta=40_000,
    )
    fig4_bench = BenchConfig(delay_ps=0)  # the 40 ns propagation lag lives in the pair model
    fig4 = ScenarioConfig(
        name="fig4-anticorrelated",
        source=pair,
        duration=_SECOND // 8,
        dt=2_000,
        seed=20260403,
        bench=fig4_bench,
        correlograms=(
            _corr("d1xd3", "d1", "d3"),
            _corr("d1xd2", "d1", "d2"),
            _corr("d3xd4", "d3", "d4"),
        ),
        analyses=(
            analysis_request("antiphase", a="d1xd3", b="d1xd2"),
            analysis_request("peak_stats", correlogram="d3xd4"),
            analysis_request(
                "witness",
                cross="d1xd3",
                g_ii0=float(np.exp(0.5)),
                g_vv0=6.0,
            ),
        ),
    )
    fig4_semi = replace(
        fig4,
        name="fig4-semiclassical",
        source=replace(pair, rho=+0.9),
    )

    fig5 = ScenarioConfig(
        name="fig5-independent",
        source=(
            ArmSource("arm1", sources.Chaotic(rate=1.5e6, tau_c=1_000_000), dt=100_000),
            ArmSource("arm2", replace(_FIG3_MODE, mean_rate=1.5e6), dt=4_000),
        ),
        duration=_SECOND // 4,
        dt=4_000,
        seed=20260504,
        correlograms=(
            _corr("d1xd3", "d1", "d3"),
            _corr("d1xd2", "d1", "d2"),
            _corr("d3xd4", "d3", "d4"),
        ),
        analyses=(
            analysis_request("witness", cross="d1xd3", g_ii0=2.0, g_vv0=6.0),
        ),
    )

    pulse = ScenarioConfig(
        name="pulsetrain-35",
        source=sources.PulseTrainMultimode(n_modes=35, t_rep=1_400_000, total_rate=2.8e7),
        duration=_SECOND,
        dt=4_000,
        seed=20260605,
        bench=BenchConfig(nf_transmission=1.0 / 35.0),
        correlograms=(
            _corr("d1xd2", "d1", "d2"),
            _corr("d3xd4", "d3", "d4"),
            _corr("d1xd3", "d1", "d3"),
        ),
        analyses=(
            analysis_request("peak_stats", correlogram="d3xd4"),
            analysis_request("witness", cross="d1xd3", g_ii0=1.0, g_vv0=35.0),
        ),
    )

    lamp = ScenarioConfig(
        name="modulated-lamp",
        source=sources.Modulated(
            base=sources.Chaotic(rate=2.0e6, tau_c=40_000), period=10_000_000, depth=0.8
        ),
        route="arm1",
        duration=_SECOND // 4,
        dt=4_000,
        seed=20260706,
        correlograms=(
            _corr("d1xd2", "d1", "d2", CorrelogramSpec(200_000, -25_000_000, 25_000_000)),
        ),
        analyses=(
            analysis_request(
                "witness", cross="d1xd2", g_ii0=2.0 * 1.32, g_vv0=2.0 * 1.32
            ),
        ),
    )

    return [fig2, fig3, fig4, fig4_semi, fig5, pulse, lamp]


def builtin_scenario(name: str) -> ScenarioConfig:
    for cfg in builtin_scenarios():
        if cfg.name == name:
            return cfg
    known = ", ".join(c.name for c in builtin_scenarios())
    raise ConfigError(f"unknown builtin scenario {name!r} (known: {known})")
