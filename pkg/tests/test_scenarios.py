"""Scenario configs, the end-to-end pipeline, and its reports."""

import json
import math
import os
from dataclasses import replace

import numpy as np
import pytest

from hbtsim import sources
from hbtsim.correlator import CorrelogramSpec
from hbtsim.optics import DetectorModel
from hbtsim.scenarios import (
    ArmSource,
    BenchConfig,
    ConfigError,
    CorrelogramRequest,
    ScenarioConfig,
    ScenarioError,
    analysis_request,
    builtin_scenario,
    builtin_scenarios,
    load_scenario,
    run_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from hbtsim.tags import read_stream

BUILTIN_NAMES = [
    "fig2-coherent",
    "fig3-singlemode",
    "fig4-anticorrelated",
    "fig4-semiclassical",
    "fig5-independent",
    "pulsetrain-35",
    "modulated-lamp",
]


def mini_config(**overrides):
    base = dict(
        name="mini",
        source=sources.Coherent(rate=2.0e6),
        route="arm1",
        duration=2_000_000_000,  # 2 ms
        dt=1_000_000,
        seed=99,
        correlograms=(
            CorrelogramRequest("d1xd2", "d1", "d2", CorrelogramSpec(2_000, -100_000, 100_000)),
        ),
        analyses=(
            analysis_request("peak_stats", correlogram="d1xd2"),
            analysis_request("witness", cross="d1xd2", g_ii0=1.0, g_vv0=1.0),
        ),
    )
    base.update(overrides)
    return ScenarioConfig(**base)


class TestBuiltins:
    def test_exactly_the_seven(self):
        assert [c.name for c in builtin_scenarios()] == BUILTIN_NAMES

    def test_lookup(self):
        assert builtin_scenario("fig3-singlemode").name == "fig3-singlemode"
        with pytest.raises(ConfigError):
            builtin_scenario("fig9-nope")

    def test_all_configs_serialize(self):
        for cfg in builtin_scenarios():
            assert scenario_from_dict(scenario_to_dict(cfg)) == cfg


class TestConfigIO:
    def test_roundtrip_with_bench_overrides(self):
        cfg = mini_config(
            bench=BenchConfig(
                nf_transmission=0.5,
                delay_ps=12_000,
                detectors=(("d1", DetectorModel(efficiency=0.7)),),
            )
        )
        assert scenario_from_dict(scenario_to_dict(cfg)) == cfg

    def test_per_arm_sources_roundtrip(self):
        cfg = mini_config(
            source=(
                ArmSource("arm1", sources.Chaotic(rate=1e6, tau_c=1_000_000), dt=100_000),
                ArmSource("arm2", sources.Coherent(rate=1e6), dt=1_000_000),
            ),
            route=None,
        )
        assert scenario_from_dict(scenario_to_dict(cfg)) == cfg

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(scenario_to_dict(mini_config())))
        assert load_scenario(str(path)) == mini_config()

    def test_bad_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError):
            load_scenario(str(path))

    def test_missing_fields_rejected(self):
        with pytest.raises(ConfigError):
            scenario_from_dict({"name": "x"})
        with pytest.raises(ConfigError):
            scenario_from_dict({"name": "x", "seed": 1, "duration_ps": 10, "dt_ps": 1, "source": {"kind": "wat"}})

    def test_duplicate_correlogram_names_rejected(self):
        with pytest.raises(ConfigError):
            mini_config(
                correlograms=(
                    CorrelogramRequest("c", "d1", "d2"),
                    CorrelogramRequest("c", "d1", "d2"),
                )
            )


class TestPipeline:
    def test_artifacts_and_report(self, tmp_path):
        out = str(tmp_path / "run")
        res = run_scenario(mini_config(), out_dir=out)
        assert os.path.exists(os.path.join(out, "streams.ptt"))
        assert os.path.exists(os.path.join(out, "d1xd2.csv"))
        assert os.path.exists(os.path.join(out, "witness_d1xd2.csv"))
        assert os.path.exists(os.path.join(out, "report.json"))
        with open(os.path.join(out, "report.json")) as fh:
            report = json.load(fh)
        assert report["name"] == "mini"
        assert set(report["tag_counts"]) == {"d1", "d2", "d3", "d4"}
        assert report["correlograms"][0]["name"] == "d1xd2"
        assert all(("error" in b) or b for b in report["analyses"].values())
        assert "timing" in report
        stream = read_stream(os.path.join(out, "streams.ptt"))
        assert len(stream) == res.report["tags_total"]

    def test_deterministic_csv_bytes(self, tmp_path, monkeypatch):
        cfg = mini_config()
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        run_scenario(cfg, out_dir=out1)
        monkeypatch.setenv("HBT_THREADS", "4")
        run_scenario(cfg, out_dir=out2)
        with open(os.path.join(out1, "d1xd2.csv"), "rb") as fh:
            c1 = fh.read()
        with open(os.path.join(out2, "d1xd2.csv"), "rb") as fh:
            c2 = fh.read()
        assert c1 == c2
        with open(os.path.join(out1, "streams.ptt"), "rb") as fh:
            s1 = fh.read()
        with open(os.path.join(out2, "streams.ptt"), "rb") as fh:
            s2 = fh.read()
        assert s1 == s2

    def test_seed_changes_streams(self):
        r1 = run_scenario(mini_config())
        r2 = run_scenario(mini_config(seed=100))
        assert r1.stream != r2.stream

    def test_detected_rates_scale_through_bench(self):
        res = run_scenario(mini_config())
        counts = res.report["tag_counts"]
        # rate 2e6 * bs 0.5 * fbs 0.5 * 2 ms = 1000 per detector
        assert abs(counts["d1"] - 1000) < 4 * math.sqrt(1000)
        assert abs(counts["d2"] - 1000) < 4 * math.sqrt(1000)

    def test_route_arm2_uses_d3_d4(self):
        cfg = mini_config(
            source=sources.Coherent(rate=2.0e6),
            route="arm2",
            correlograms=(CorrelogramRequest("d3xd4", "d3", "d4", CorrelogramSpec(2_000, -100_000, 100_000)),),
            analyses=(),
        )
        res = run_scenario(cfg)
        counts = res.report["tag_counts"]
        assert counts["d1"] == 0 and counts["d3"] > 0

    def test_arm2_delay_shifts_timestamps(self):
        cfg = mini_config(
            source=sources.Coherent(rate=2.0e6),
            route="arm2",
            bench=BenchConfig(delay_ps=77_000),
            correlograms=(),
            analyses=(),
        )
        res = run_scenario(cfg)
        assert int(res.stream.t.min()) >= 77_000

    def test_independent_arm_sources_differ(self):
        cfg = mini_config(
            source=(
                ArmSource("arm1", sources.Coherent(rate=2.0e6), dt=1_000_000),
                ArmSource("arm2", sources.Coherent(rate=2.0e6), dt=1_000_000),
            ),
            route=None,
            correlograms=(),
            analyses=(),
        )
        res = run_scenario(cfg)
        d1 = res.stream.select(0)
        d3 = res.stream.select(2)
        assert d1.size and d3.size and not np.array_equal(d1[: min(d1.size, d3.size)], d3[: min(d1.size, d3.size)])

    def test_analysis_error_is_an_entry_not_a_crash(self):
        cfg = mini_config(analyses=(analysis_request("peak_stats", correlogram="nope"),))
        res = run_scenario(cfg)
        (block,) = res.analyses.values()
        assert "error" in block

    def test_stage_error_cleans_artifacts(self, tmp_path):
        out = str(tmp_path / "broken")
        cfg = mini_config(duration=1_500_000)  # not a whole number of dt bins
        with pytest.raises(ScenarioError) as exc_info:
            run_scenario(cfg, out_dir=out)
        err = exc_info.value
        assert err.stage == "sources"
        assert err.report["error"]["stage"] == "sources"
        leftovers = [p for p in os.listdir(out)] if os.path.isdir(out) else []
        assert leftovers == []

    def test_duration_warning_below_self_averaging(self):
        model = sources.LogGaussianCox(mean_rate=1e7, sigma2=0.5, tau_d=190_000, t_osc=40_000)
        with pytest.warns(UserWarning):
            mini_config(source=model, route="arm2", duration=2_000_000, dt=2_000, correlograms=(), analyses=())
