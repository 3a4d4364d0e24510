#!/usr/bin/env python3
"""
How much does a stale beam cost, as a function of surface size?

The naive controller's loss depends on how far the UE moves across the
beam during one hold-plus-delay interval. A bigger surface makes a
narrower beam, so the same motion costs more. This runs UE1 without noise
at 50 ms delay for a few square surfaces.

Bigger surfaces are slower to simulate (cost grows with the cell count).
"""

import time

from risbeam.harness.scenarios import ue1
from risbeam.harness.simulate import power_loss, simulate

SIZES = [10, 20, 30, 45]

print(f"{'cells':>7} {'naive mean':>11} {'naive max':>10} {'ops mean':>9}   (dB)")
for n in SIZES:
    cfg = ue1(rows=n, cols=n, t_d=0.05, t_d_hat=0.05)
    t0 = time.perf_counter()
    s = power_loss(simulate(cfg)[0], cfg.analysis_window)
    print(f"{n:>3}x{n:<3} {s.mean['naive']:11.2f} {s.max['naive']:10.2f} {s.mean['ops']:9.4f}"
          f"   ({time.perf_counter() - t0:.0f} s)")
