"""Command-line interface.

Subcommands:
    simulate   generate streams (.ptt) + report from a scenario config
    scenario   full pipeline (simulate + correlate + analyses)
    correlate  histogram g2 between two channels of stream files
    fit        damped-oscillation fit of a correlogram CSV
    witness    Cauchy-Schwarz witness curve from a cross-correlogram CSV
    scenarios  list the builtin scenario names

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 analysis
non-convergence (report still written). HBT_THREADS caps correlator
parallelism; results are bit-identical for any value.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace

from . import analysis as ana
from . import scenarios as scn
from .correlator import CorrelogramSpec, correlate, read_correlogram_csv, write_correlogram_csv
from .tags import StreamError, read_stream, read_stream_csv


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="hbtsim", description="Photon time-tag HBT simulator and correlator")
    sub = p.add_subparsers(dest="cmd")

    sim = sub.add_parser("simulate", help="generate tag streams and a report")
    sim.add_argument("--config", required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", required=True)

    sc = sub.add_parser("scenario", help="run the full scenario pipeline")
    g = sc.add_mutually_exclusive_group(required=True)
    g.add_argument("--name", help="builtin scenario name")
    g.add_argument("--config", help="scenario config JSON")
    sc.add_argument("--seed", type=int, default=None)
    sc.add_argument("--out", required=True)

    co = sub.add_parser("correlate", help="correlate two stream channels")
    co.add_argument("--a", required=True, metavar="FILE:CH")
    co.add_argument("--b", required=True, metavar="FILE:CH")
    co.add_argument("--bin-ps", type=int, required=True)
    co.add_argument("--tau-min-ps", type=int, required=True)
    co.add_argument("--tau-max-ps", type=int, required=True)
    co.add_argument("--out", required=True)

    ft = sub.add_parser("fit", help="fit the damped-oscillation law to a correlogram")
    ft.add_argument("--in", dest="infile", required=True)
    ft.add_argument("--out", required=True)

    wt = sub.add_parser("witness", help="Cauchy-Schwarz witness from a cross-correlogram")
    wt.add_argument("--gii0", type=float, required=True)
    wt.add_argument("--gvv0", type=float, required=True)
    wt.add_argument("--in", dest="infile", required=True)
    wt.add_argument("--out", required=True)

    sub.add_parser("scenarios", help="list builtin scenarios")
    return p


def _load_stream(spec: str):
    path, sep, ch = spec.rpartition(":")
    if not sep or not ch.lstrip("-").isdigit():
        raise UsageError(f"stream must be given as FILE:CHANNEL, got {spec!r}")
    channel = int(ch)
    if path.endswith(".csv"):
        return read_stream_csv(path), channel
    return read_stream(path), channel


def _load_config(args) -> scn.ScenarioConfig:
    if getattr(args, "name", None):
        cfg = scn.builtin_scenario(args.name)
    else:
        cfg = scn.load_scenario(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _cmd_simulate(args) -> int:
    cfg = replace(_load_config(args), correlograms=(), analyses=())
    scn.run_scenario(cfg, out_dir=args.out)
    return 0


def _cmd_scenario(args) -> int:
    cfg = _load_config(args)
    result = scn.run_scenario(cfg, out_dir=args.out)
    code = 0
    for block in result.analyses.values():
        if isinstance(block, dict) and "error" in block:
            print(f"analysis error: {block['error']}", file=sys.stderr)
            code = max(code, 2)
        elif isinstance(block, dict) and block.get("converged") is False:
            print("fit did not converge (report written)", file=sys.stderr)
            code = max(code, 3)
    return code


def _cmd_correlate(args) -> int:
    (a, ch_a) = _load_stream(args.a)
    (b, ch_b) = _load_stream(args.b)
    spec = CorrelogramSpec(args.bin_ps, args.tau_min_ps, args.tau_max_ps)
    c = correlate(a, b, spec, ch_a, ch_b)
    write_correlogram_csv(c, args.out)
    return 0


def _cmd_fit(args) -> int:
    c = read_correlogram_csv(args.infile)
    fit = ana.fit_damped_oscillation(c)
    with open(args.out, "w") as fh:
        json.dump(asdict(fit), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0 if fit.converged else 3


def _cmd_witness(args) -> int:
    c = read_correlogram_csv(args.infile)
    curve = ana.cs_witness(args.gii0, args.gvv0, c)
    ana.write_witness_csv(curve, args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd is None:
            raise UsageError("a subcommand is required (see --help)")
        if args.cmd == "scenarios":
            for cfg in scn.builtin_scenarios():
                print(cfg.name)
            return 0
        handler = {
            "simulate": _cmd_simulate,
            "scenario": _cmd_scenario,
            "correlate": _cmd_correlate,
            "fit": _cmd_fit,
            "witness": _cmd_witness,
        }[args.cmd]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except scn.ScenarioError as exc:
        # partial artifacts were removed; persist the report with the error
        out = getattr(args, "out", None)
        if out:
            import os

            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, "report.json"), "w") as fh:
                json.dump(exc.report, fh, indent=2, sort_keys=True)
        print(exc, file=sys.stderr)
        return 2
    except (StreamError, scn.ConfigError, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
