"""Command-line entry point: ``risbeam {lut,simulate,sweep,trace}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..em_cell import build_lut
from ..kinematics import Trace, TraceError, read_trace, resample_trace, write_trace
from .config import ConfigError, ScenarioConfig, read_config
from .io import export_series, export_summary
from .scenarios import GM_ALPHAS, GM_SIGMA_BETAS, PRESETS
from .simulate import aggregate, power_loss, simulate
from .sweep import AXES, export_sweep, gm_grid, sweep


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _scenario(args) -> ScenarioConfig:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset, not both")
    if args.config:
        cfg = read_config(args.config)
    else:
        cfg = PRESETS[args.preset or "ue1"]()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "realizations", None) is not None:
        changes["realizations"] = args.realizations
    return cfg.replace(**changes) if changes else cfg


def cmd_lut(args) -> int:
    cfg = _scenario(args)
    n = args.points or cfg.lut_points
    lut = build_lut(cfg.varactor, cfg.cell_geometry, cfg.lut_v_min, cfg.lut_v_max, n)
    lut.to_csv(args.out)
    span = np.degrees(np.ptp(np.unwrap(np.angle(lut.gammas))))
    print(f"wrote {len(lut.voltages)} entries to {args.out} "
          f"(phase span {span:.1f} deg, |gamma| {np.abs(lut.gammas).min():.3f}"
          f"..{np.abs(lut.gammas).max():.5f})")
    return 0


def cmd_simulate(args) -> int:
    cfg = _scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runs = simulate(cfg)
    window = cfg.analysis_window
    summaries = []
    for s in runs:
        export_series(s, out / f"series_r{s.realization:04d}.csv")
        summaries.append(power_loss(s, window))
    total = aggregate(summaries)
    export_summary(total, out / "summary.json", scenario=cfg.name)
    means = ", ".join(f"{a} {v:.4g} dB" for a, v in total.mean.items())
    print(f"{cfg.name}: {len(runs)} realization(s), window {window[0]:g}-{window[1]:g} s: {means}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _scenario(args)
    if args.axis == "gm_grid":
        alphas = args.alphas or list(GM_ALPHAS)
        betas = args.sigma_betas or list(GM_SIGMA_BETAS)
        values = gm_grid(alphas, betas)
        if cfg.kind != "gauss_markov":
            cfg = PRESETS["ue4_gauss_markov"]().replace(seed=cfg.seed, realizations=cfg.realizations)
    else:
        if not args.values:
            raise ConfigError("--values is required for this axis")
        values = args.values
    points = sweep(cfg, args.axis, values, workers=args.workers)
    export_sweep(points, args.axis, args.out)
    for p in points:
        label = ",".join(f"{v:g}" for v in p.value)
        means = "  ".join(f"{a}={m:.4g}" for a, m in p.summary.mean.items())
        print(f"{args.axis}={label}  {means}")
    return 0


def cmd_trace(args) -> int:
    tr = read_trace(args.input)
    print(f"{args.input}: {len(tr.times)} {tr.kind} samples, "
          f"t = {tr.times[0]:g}..{tr.times[-1]:g} s")
    tr = tr.transformed(args.permute or (0, 1, 2), args.offset or (0.0, 0.0, 0.0))
    if args.resample:
        grid = resample_trace(tr, args.resample, args.method)
        t = tr.times[0] + np.arange(len(grid)) * args.resample
        tr = Trace(t, grid, tr.kind)
    if args.out:
        write_trace(tr, args.out)
        print(f"wrote {len(tr.times)} samples to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risbeam",
                                description="Predictive RIS beamforming simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_flags(sp, runs=True):
        sp.add_argument("--config", help="scenario YAML file")
        sp.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario")
        if runs:
            sp.add_argument("--seed", type=int)
            sp.add_argument("--realizations", type=int)

    sp = sub.add_parser("lut", help="build and export the voltage -> reflection table")
    scenario_flags(sp, runs=False)
    sp.add_argument("--points", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_lut)

    sp = sub.add_parser("simulate", help="run one scenario, write per-step CSVs and a summary")
    scenario_flags(sp)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="Monte Carlo sweep over one axis or the Gauss-Markov grid")
    scenario_flags(sp)
    sp.add_argument("--axis", required=True, choices=AXES)
    sp.add_argument("--values", type=_floats, help="comma-separated axis values")
    sp.add_argument("--alphas", type=_floats, help="gm_grid memory factors")
    sp.add_argument("--sigma-betas", type=_floats, help="gm_grid randomness levels (m/s)")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True, help="summary CSV")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("trace", help="validate, transform and resample a trace CSV")
    sp.add_argument("input")
    sp.add_argument("--permute", type=lambda s: tuple(int(x) for x in s.split(",")),
                    help="output axis i takes input axis perm[i], e.g. 1,0,2")
    sp.add_argument("--offset", type=_floats, help="x,y,z offset (position traces)")
    sp.add_argument("--resample", type=float, metavar="STEP_S")
    sp.add_argument("--method", choices=("linear", "cubic-spline"), default="cubic-spline")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TraceError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
