#!/usr/bin/env python3
"""
UE1 received power, step by step
================================

A UE drives past the surface at 20 m/s along x while drifting along y
under a constant -4 m/s^2 acceleration. Localization arrives every 100 ms
with 10 cm noise, and every voltage update lands 20 ms after it was computed.

Four beam controllers run side by side on the same track:
  ideal  - steers at the true position every millisecond, no delay
  naive  - steers at the last raw fix and holds it
  ops    - observer + predictor using estimated speed
  opa    - observer + predictor using speed and acceleration

The script prints the power every 100 ms and writes the full 1 kHz series
to ue1_series.csv for plotting elsewhere.
"""

import sys

from risbeam.harness.io import export_series
from risbeam.harness.scenarios import ue1
from risbeam.harness.simulate import power_loss, simulate

sigma = float(sys.argv[1]) if len(sys.argv) > 1 else 0.1
cfg = ue1(sigma_n=sigma)
s = simulate(cfg)[0]

print(f"UE1, sigma_n = {sigma} m, t_d = {cfg.t_d * 1e3:.0f} ms")
print(f"{'t [s]':>6} {'ideal':>9} {'naive':>9} {'ops':>9} {'opa':>9}   (dBm)")
for k in range(0, len(s), 100):
    row = " ".join(f"{s.pr_dbm[a][k]:9.2f}" for a in ("ideal", "naive", "ops", "opa"))
    print(f"{s.t[k]:6.2f} {row}")

summary = power_loss(s, cfg.analysis_window)
print(f"\nloss vs ideal over {summary.window[0]:.1f}-{summary.window[1]:.1f} s:")
for a in ("naive", "ops", "opa"):
    print(f"  {a:5s} mean {summary.mean[a]:6.3f} dB   max {summary.max[a]:6.2f} dB")

export_series(s, "ue1_series.csv")
print("\nwrote ue1_series.csv")
