#!/usr/bin/env python3
"""
Car launch from rest (synthetic acceleration trace).

The car starts 150 m up the y axis and accelerates along -y to roughly
100 km/h in 11 s. The bundled trace is a stand-in shaped like a typical
launch (quick ramp to ~6 m/s^2, then a taper), not recorded data; point
--config at your own trace to replace it.

Losses are averaged over 7-11 s, when the car is fastest and closest.
"""

import argparse

import numpy as np

from risbeam.harness.config import read_config
from risbeam.harness.scenarios import ue2_car
from risbeam.harness.simulate import aggregate, load_scenario_trace, power_loss, simulate

ap = argparse.ArgumentParser()
ap.add_argument("--config")
ap.add_argument("--realizations", type=int, default=10)
args = ap.parse_args()

cfg = read_config(args.config) if args.config else ue2_car()
cfg = cfg.replace(realizations=args.realizations)

tr = load_scenario_trace(cfg)
a_peak = np.abs(tr.values).max()
print(f"trace: {len(tr.times)} samples over {tr.duration:.1f} s, peak |a| {a_peak:.1f} m/s^2")

runs = simulate(cfg)
speed = np.linalg.norm(np.diff(runs[0].true_pos, axis=0), axis=1) / cfg.step_t
print(f"final speed {speed[-1] * 3.6:.0f} km/h")

total = aggregate([power_loss(s, cfg.analysis_window) for s in runs])
w0, w1 = total.window
print(f"\nmean loss vs ideal, {w0:g}-{w1:g} s, {total.realizations} runs")
for a in ("naive", "ops", "opa"):
    print(f"  {a:5s} {total.mean[a]:6.3f} dB   (worst step {total.max[a]:5.2f} dB)")
