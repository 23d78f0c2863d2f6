"""
Command-line harness: `sim table|fig2|readout|sweep|mechanics`.

Every command loads a JSON config (all fields defaulted), writes CSV data
files into the output directory, and records a manifest.json echoing the
config, command line, wall time, and sha256 digests of everything written.
Exit codes: 0 success, 1 validation error, 2 io error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import SimulationConfig, parse_config
from .dynamics import evolve_numeric, fig2_timeseries, imperfect_flip_state
from .errors import ConfigError, NumericFailure
from .protocol import (InsideSpinState, classify, fidelity_sweep,
                       resonance_frequency, run_window, write_events_csv)
from .spin_core import (check_weak_coupling, eigenenergies, transition_table,
                        vibration_shift, zeeman_separation)

OUTPUT_DIR_ENV = "SIM_OUTPUT_DIR"

_STATE_NAMES = {"+3/2": 1.5, "3/2": 1.5, "-3/2": -1.5,
                "+1/2": 0.5, "1/2": 0.5, "-1/2": -0.5}


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Manifest:
    """Collects outputs for the per-invocation manifest.json."""

    def __init__(self, command: str, argv: list[str],
                 config: SimulationConfig, out_dir: Path):
        self.command = command
        self.argv = argv
        self.config = config
        self.out_dir = out_dir
        self.outputs: list[Path] = []
        self.extra: dict = {}
        self._start = time.monotonic()

    def add(self, path: Path) -> None:
        self.outputs.append(path)

    def write(self) -> None:
        doc = {
            "artifact_version": __version__,
            "command": self.command,
            "argv": self.argv,
            "config": self.config.to_dict(),
            "duration_s": time.monotonic() - self._start,
            "outputs": [{"path": p.name, "sha256": _sha256(p)}
                        for p in self.outputs],
        }
        doc.update(self.extra)
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _print_weak_coupling(config: SimulationConfig) -> None:
    check = check_weak_coupling(config.system)
    status = "ok" if check.ok else "VIOLATED"
    print(f"weak-coupling |J|/|nu2-nu1| = {check.ratio:.4g} ({status})")


def cmd_table(config: SimulationConfig, manifest: Manifest) -> None:
    table = transition_table(config.system, config.aniso)
    levels = eigenenergies(config.system, config.aniso)
    tpath = manifest.out_dir / "transitions.csv"
    with open(tpath, "w") as fh:
        fh.write("row,kind,m1_initial,m2_initial,m1_final,m2_final,"
                 "formula,frequency_mhz\n")
        for i, r in enumerate(table.rows, start=1):
            fh.write(f"{i},{r.kind},{_fmt(r.initial[0])},{_fmt(r.initial[1])},"
                     f"{_fmt(r.final[0])},{_fmt(r.final[1])},"
                     f"\"{r.formula}\",{_fmt(r.frequency)}\n")
    manifest.add(tpath)
    lpath = manifest.out_dir / "levels.csv"
    with open(lpath, "w") as fh:
        fh.write("m1,m2,energy_mhz\n")
        for lv in levels:
            fh.write(f"{_fmt(lv.m1)},{_fmt(lv.m2)},{_fmt(lv.energy)}\n")
    manifest.add(lpath)
    _print_weak_coupling(config)
    print(f"wrote {tpath.name} ({len(table.rows)} rows), "
          f"{lpath.name} ({len(levels)} levels)")


def cmd_fig2(config: SimulationConfig, manifest: Manifest,
             alphas: list[float], dt_numeric: float = 0.1) -> None:
    overall = 0.0
    for alpha in alphas:
        series = fig2_timeseries(alpha, config.rates, t_end=1000.0, dt=1.0)
        rho = imperfect_flip_state(alpha, "+")
        num = np.empty((len(series.times), 3))
        num[0] = [rho[0, 0].real, abs(rho[0, 1]), rho[1, 1].real]
        for i in range(1, len(series.times)):
            step = series.times[i] - series.times[i - 1]
            rho = evolve_numeric(rho, config.rates, None, step, dt_numeric)
            num[i] = [rho[0, 0].real, abs(rho[0, 1]), rho[1, 1].real]
        dev = np.max(np.abs(
            num - np.column_stack([series.P1, series.P2, series.P3])), axis=1)
        overall = max(overall, float(dev.max()))
        path = manifest.out_dir / f"fig2_alpha_{alpha:g}.csv"
        with open(path, "w") as fh:
            fh.write("t_ns,P1,P2,P3,P1_numeric,P2_numeric,P3_numeric,"
                     "max_abs_dev\n")
            for i, t in enumerate(series.times):
                fh.write(",".join(_fmt(v) for v in (
                    t, series.P1[i], series.P2[i], series.P3[i],
                    num[i, 0], num[i, 1], num[i, 2], dev[i])) + "\n")
        manifest.add(path)
        print(f"alpha={alpha:g}: max analytic/numeric deviation "
              f"{dev.max():.3e}")
    manifest.extra["max_abs_deviation"] = overall


def cmd_readout(config: SimulationConfig, manifest: Manifest,
                true_state: float, encoding: str, events: bool) -> None:
    inside = InsideSpinState(true_state, encoding)
    table = transition_table(config.system, config.aniso)
    freq = resonance_frequency(inside, table)
    pulse = dataclasses.replace(config.pulse, frequency=freq)
    trace = run_window(inside, pulse, config.system, config.tunneling,
                       config.rates, config.seed, collect_events=events)
    result = classify(trace, config.tunneling, encoding)
    manifest.extra["interrogation_mhz"] = freq
    path = manifest.out_dir / "readout.csv"
    with open(path, "w") as fh:
        fh.write("true_m1,encoding,interrogation_mhz,n_cycles,counts_on,"
                 "baseline,threshold,classified_m1,contrast,seed\n")
        fh.write(f"{_fmt(inside.m1)},{encoding},{_fmt(freq)},"
                 f"{trace.n_cycles},{result.counts_on},"
                 f"{_fmt(result.baseline)},{_fmt(result.threshold)},"
                 f"{_fmt(result.classified.m1)},{_fmt(result.contrast)},"
                 f"{trace.seed}\n")
    manifest.add(path)
    jpath = manifest.out_dir / "readout.jsonl"
    with open(jpath, "w") as fh:
        fh.write(json.dumps({
            "true_m1": inside.m1, "encoding": encoding,
            "interrogation_mhz": freq, "n_cycles": trace.n_cycles,
            "counts_on": result.counts_on, "baseline": result.baseline,
            "threshold": result.threshold,
            "classified_m1": result.classified.m1,
            "contrast": result.contrast, "seed": trace.seed}) + "\n")
    manifest.add(jpath)
    if events:
        epath = manifest.out_dir / "events.csv"
        write_events_csv(trace, epath)
        manifest.add(epath)
    print(f"classified m1 = {result.classified.m1:+g} ({encoding}), "
          f"counts {result.counts_on}/{trace.n_cycles}, "
          f"contrast {result.contrast:.6f}")


def cmd_sweep(config: SimulationConfig, manifest: Manifest,
              alphas: list[float], leaks: list[float], trials: int,
              encoding: str) -> None:
    if not alphas or not leaks:
        raise ConfigError("sweep: alpha and leak grids must be non-empty")
    cells = fidelity_sweep(encoding, config.system, config.rates, alphas,
                           leaks, trials, config.seed,
                           tunneling=config.tunneling,
                           pulse_duration=config.pulse.duration)
    path = manifest.out_dir / "sweep.csv"
    with open(path, "w") as fh:
        fh.write("alpha,p_leak,encoding,true_m1,trials,misclassified,rate,"
                 "base_seed\n")
        for c in cells:
            fh.write(f"{_fmt(c.alpha)},{_fmt(c.p_leak)},"
                     f"{c.true_state.encoding},{_fmt(c.true_state.m1)},"
                     f"{c.trials},{c.misclassified},{_fmt(c.rate)},"
                     f"{config.seed}\n")
    manifest.add(path)
    jpath = manifest.out_dir / "sweep.jsonl"
    with open(jpath, "w") as fh:
        for c in cells:
            fh.write(json.dumps({
                "alpha": c.alpha, "p_leak": c.p_leak,
                "encoding": c.true_state.encoding,
                "true_m1": c.true_state.m1, "trials": c.trials,
                "misclassified": c.misclassified, "rate": c.rate,
                "base_seed": config.seed}) + "\n")
    manifest.add(jpath)
    worst = max(c.rate for c in cells)
    print(f"sweep: {len(cells)} cells, worst misclassification rate "
          f"{worst:.4g}")


def cmd_mechanics(config: SimulationConfig, manifest: Manifest) -> None:
    shift = vibration_shift(config.system.constants, config.mechanics)
    sep = zeeman_separation(config.system.constants, config.mechanics)
    ok = sep >= 127.0
    print(f"vibration shift dz = {shift.shift:.4g} m "
          f"({shift.shift * 1e12:.4g} pm)")
    print(f"Coulomb displacement reference = "
          f"{config.mechanics.coulomb_shift:.4g} m")
    print(f"ratio dz / reference = {shift.ratio:.4g}")
    print(f"Zeeman separation = {sep:.4g} MHz "
          f"({'>=127 MHz satisfied' if ok else 'below 127 MHz'})")
    manifest.extra.update({
        "vibration_shift_m": shift.shift, "shift_ratio": shift.ratio,
        "zeeman_separation_mhz": sep, "separation_ok": ok})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="SET-based single-spin readout simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")

    common(sub.add_parser("table", help="transition table and levels"))
    p = sub.add_parser("fig2", help="free-decay time series")
    common(p)
    p.add_argument("--alphas", default="0.1,0.2",
                   help="comma-separated flip-error fractions")
    p = sub.add_parser("readout", help="single readout window")
    common(p)
    p.add_argument("--true-state", default="+3/2",
                   choices=sorted(_STATE_NAMES))
    p.add_argument("--encoding", default=None, choices=["outer", "inner"])
    p.add_argument("--events", action="store_true",
                   help="write per-electron event log")
    p = sub.add_parser("sweep", help="misclassification-rate grid")
    common(p)
    p.add_argument("--alphas", default="0,0.1,0.2")
    p.add_argument("--leaks", default="0,0.05")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--encoding", default="both",
                   choices=["outer", "inner", "both"])
    common(sub.add_parser("mechanics", help="spin-vibration report"))
    return parser


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"invalid grid '{text}'") from exc


def run(argv: list[str]) -> None:
    args = build_parser().parse_args(argv)
    config = parse_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed: expected a non-negative integer")
        config = dataclasses.replace(config, seed=args.seed)
    out_dir = Path(args.out or os.environ.get(OUTPUT_DIR_ENV)
                   or config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(args.command, list(argv), config, out_dir)
    if args.command == "table":
        cmd_table(config, manifest)
    elif args.command == "fig2":
        cmd_fig2(config, manifest, _parse_grid(args.alphas))
    elif args.command == "readout":
        m1 = _STATE_NAMES[args.true_state]
        encoding = args.encoding or ("outer" if abs(m1) == 1.5 else "inner")
        cmd_readout(config, manifest, m1, encoding, args.events)
    elif args.command == "sweep":
        cmd_sweep(config, manifest, _parse_grid(args.alphas),
                  _parse_grid(args.leaks), args.trials, args.encoding)
    elif args.command == "mechanics":
        cmd_mechanics(config, manifest)
    manifest.write()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        run(argv)
    except ConfigError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
