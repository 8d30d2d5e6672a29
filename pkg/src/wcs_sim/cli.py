"""Command-line front end: run / sweep / validate.

All output files are written with locale-independent formatting and nine
significant digits, so identical (config, seed) pairs yield byte-identical
files.  Sweeps fan experiments out over processes; WCS_SIM_THREADS caps the
worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .sim import ConfigError, ExperimentConfig, Summary, TraceRecord, run_experiment
from .validate import PASS, run_all_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_IO = 3


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_states_csv(path: Path, trace: TraceRecord) -> None:
    if trace.inputs.shape[2] != 1:
        raise ValueError("states.csv assumes a single input per agent")
    lines = ["time_s,agent,s,s_dot,theta,theta_dot,u_applied"]
    steps, n_agents, _ = trace.states.shape
    for k in range(steps):
        t = _fmt(trace.times[k])
        for i in range(n_agents):
            s = trace.states[k, i]
            lines.append(f"{t},{i},{_fmt(s[0])},{_fmt(s[1])},{_fmt(s[2])},{_fmt(s[3])},"
                         f"{_fmt(trace.inputs[k, i, 0])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_rounds_csv(path: Path, trace: TraceRecord) -> None:
    lines = ["round,time_s,slots_control,slots_other,slots_free,"
             "sent_agents,lost_to_manager,radio_on_s"]
    for r in range(trace.n_rounds):
        sent = ";".join(str(a) for a in trace.sent_agents[r])
        lost = ";".join(str(a) for a in trace.lost_to_manager[r])
        lines.append(f"{r},{_fmt(trace.round_times[r])},{trace.slots_control[r]},"
                     f"{trace.slots_other[r]},{trace.slots_free[r]},{sent},{lost},"
                     f"{_fmt(trace.radio_on_mean[r])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_summary_json(path: Path, summary: Summary) -> None:
    payload = {
        "rmse_sync": summary.rmse_sync,
        "control_fraction": summary.control_fraction,
        "other_fraction": summary.other_fraction,
        "free_fraction": summary.free_fraction,
        "duty_cycle_control": summary.duty_cycle_control,
        "energy_savings_vs_periodic": summary.energy_savings_vs_periodic,
        "empirical_cost": summary.empirical_cost,
        "rounds": summary.rounds,
        "seed": summary.seed,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _manifest_payload(cfg: ExperimentConfig, seeds: list[int], out_dir: Path) -> dict:
    return {
        "config": asdict(cfg),
        "seeds": seeds,
        "output_dir": str(out_dir),
        "tool_version": __version__,
        "wall_clock_s": None,
        "status": "running",
    }


def _write_manifest(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=list) + "\n",
                    encoding="utf-8")


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config, seed=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = _manifest_payload(cfg, [cfg.seed], out_dir)
        _write_manifest(out_dir / "manifest.json", manifest)
        started = time.perf_counter()
        trace, summary = run_experiment(cfg)
        write_states_csv(out_dir / "states.csv", trace)
        write_rounds_csv(out_dir / "rounds.csv", trace)
        write_summary_json(out_dir / "summary.json", summary)
        manifest["wall_clock_s"] = time.perf_counter() - started
        manifest["status"] = "complete"
        _write_manifest(out_dir / "manifest.json", manifest)
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"run complete: {summary.rounds} rounds, "
          f"control fraction {summary.control_fraction:.3f}, "
          f"rmse {summary.rmse_sync:.6g} -> {out_dir}")
    return EXIT_OK


SWEEP_METRICS = ("control_fraction", "other_fraction", "free_fraction",
                 "rmse", "duty_cycle", "savings", "cost")


def _sweep_one(job: tuple[ExperimentConfig, float, int]) -> dict:
    base, delta, seed = job
    cfg = replace(base, delta=delta, seed=seed)
    _, summary = run_experiment(cfg)
    return {
        "delta": delta,
        "seed": seed,
        "control_fraction": summary.control_fraction,
        "other_fraction": summary.other_fraction,
        "free_fraction": summary.free_fraction,
        "rmse": summary.rmse_sync,
        "duty_cycle": summary.duty_cycle_control,
        "savings": summary.energy_savings_vs_periodic,
        "cost": summary.empirical_cost,
    }


def run_sweep(base: ExperimentConfig, deltas: list[float],
              seeds: list[int]) -> list[dict]:
    """Cross product of deltas and seeds; rows in config order."""
    jobs = [(base, delta, seed) for delta in deltas for seed in seeds]
    workers = os.cpu_count() or 1
    env_cap = os.environ.get("WCS_SIM_THREADS")
    if env_cap:
        workers = max(1, int(env_cap))
    workers = min(workers, len(jobs))
    if workers <= 1:
        return [_sweep_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_one, jobs))


def sweep_summary_rows(rows: list[dict], deltas: list[float]) -> list[dict]:
    """Per-delta median and 25th/75th percentiles of every sweep metric."""
    out = []
    for delta in deltas:
        group = [row for row in rows if row["delta"] == delta]
        entry: dict = {"delta": delta, "n_seeds": len(group)}
        for metric in SWEEP_METRICS:
            values = np.array([row[metric] for row in group])
            p25, median, p75 = np.percentile(values, [25.0, 50.0, 75.0])
            entry[f"{metric}_median"] = float(median)
            entry[f"{metric}_p25"] = float(p25)
            entry[f"{metric}_p75"] = float(p75)
        out.append(entry)
    return out


def write_sweep_csv(path: Path, rows: list[dict]) -> None:
    header = "delta,seed," + ",".join(SWEEP_METRICS)
    lines = [header]
    for row in rows:
        fields = [_fmt(row["delta"]), str(row["seed"])]
        fields += [_fmt(row[m]) for m in SWEEP_METRICS]
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sweep_summary_csv(path: Path, rows: list[dict]) -> None:
    cols = ["delta", "n_seeds"]
    for metric in SWEEP_METRICS:
        cols += [f"{metric}_median", f"{metric}_p25", f"{metric}_p75"]
    lines = [",".join(cols)]
    for row in rows:
        fields = [_fmt(row["delta"]), str(row["n_seeds"])]
        for metric in SWEEP_METRICS:
            fields += [_fmt(row[f"{metric}_{stat}"]) for stat in ("median", "p25", "p75")]
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def cmd_sweep(args) -> int:
    try:
        base = load_config(args.config)
        deltas = _parse_float_list(args.deltas)
        seeds = _parse_int_list(args.seeds)
        if not deltas or not seeds:
            raise ConfigError("sweep needs at least one delta and one seed")
        if any(d < 0 for d in deltas):
            raise ConfigError("deltas must be nonnegative")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = _manifest_payload(base, seeds, out_dir)
        manifest["deltas"] = deltas
        _write_manifest(out_dir / "manifest.json", manifest)
        started = time.perf_counter()
        rows = run_sweep(base, deltas, seeds)
        write_sweep_csv(out_dir / "sweep.csv", rows)
        write_sweep_summary_csv(out_dir / "sweep_summary.csv",
                                sweep_summary_rows(rows, deltas))
        manifest["wall_clock_s"] = time.perf_counter() - started
        manifest["status"] = "complete"
        _write_manifest(out_dir / "manifest.json", manifest)
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"sweep complete: {len(rows)} experiments -> {out_dir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    results = run_all_checks(cfg, samples=args.samples, perturb_gain=args.perturb_gain)
    all_pass = True
    for result in results:
        print(f"[{result.status.upper():>12}] {result.name}: {result.detail}")
        if result.status != PASS:
            all_pass = False
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcs-sim",
        description="Co-simulator of distributed self-triggered control over "
                    "a round-based multi-hop wireless network.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--config", required=True, help="TOML configuration file")
    p_run.add_argument("--seed", type=int, default=None, help="override [sim].seed")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a delta x seed cross product")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--deltas", required=True, help="comma-separated thresholds")
    p_sweep.add_argument("--seeds", required=True, help="comma-separated seeds")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the statistical self-checks")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--samples", type=int, default=100_000)
    p_val.add_argument("--perturb-gain", action="store_true",
                       help="negative control: corrupt the gain before checking")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
