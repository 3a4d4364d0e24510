"""Monte Carlo parameter sweeps over one scenario axis or the Gauss-Markov grid."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .config import ScenarioConfig
from .simulate import CONTROLLED, LossSummary, aggregate, power_loss, simulate

AXES = ("sigma_n", "T_M", "t_d", "t_d_hat", "gm_grid")


@dataclass
class SweepPoint:
    value: tuple
    summary: LossSummary


def point_config(cfg: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    """The scenario with one sweep value applied.

    ``t_d`` moves the true delay and its estimate together; ``t_d_hat`` moves
    only the estimate. ``gm_grid`` takes ``(alpha, sigma_beta)`` pairs.
    """
    if axis == "sigma_n":
        return cfg.replace(sigma_n=float(value))
    if axis == "T_M":
        return cfg.replace(meas_t=float(value))
    if axis == "t_d":
        return cfg.replace(t_d=float(value), t_d_hat=float(value))
    if axis == "t_d_hat":
        return cfg.replace(t_d_hat=float(value))
    if axis == "gm_grid":
        alpha, sigma_beta = value
        return cfg.replace(kind="gauss_markov", gm_alpha=float(alpha),
                           gm_sigma_beta=float(sigma_beta))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {', '.join(AXES)}")


def gm_grid(alphas, sigma_betas) -> list[tuple[float, float]]:
    return list(product(alphas, sigma_betas))


def _run_chunk(cfg: ScenarioConfig, window, realizations) -> list[LossSummary]:
    return [power_loss(s, window) for s in simulate(cfg, realizations, keep_positions=False)]


def sweep(cfg: ScenarioConfig, axis: str, values, realizations: int | None = None,
          workers: int = 1, chunk: int = 25, window=None) -> list[SweepPoint]:
    """Aggregate losses at each sweep value over ``realizations`` runs.

    Realization r always uses the streams derived from (seed, r), so a point's
    result is the same for any ``workers``/``chunk`` setting. The analysis
    window is the base scenario's unless given, so points stay comparable.
    """
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {', '.join(AXES)}")
    n = realizations or cfg.realizations
    window = window or cfg.analysis_window
    chunks = [range(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    tasks = [(j, point_config(cfg, axis, v), c) for j, v in enumerate(values) for c in chunks]

    results: dict[int, list[LossSummary]] = {j: [] for j in range(len(values))}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [(j, pool.submit(_run_chunk, pc, window, c)) for j, pc, c in tasks]
            for j, f in futs:
                results[j].extend(f.result())
    else:
        for j, pc, c in tasks:
            results[j].extend(_run_chunk(pc, window, c))

    points = []
    for j, v in enumerate(values):
        key = tuple(v) if isinstance(v, (tuple, list)) else (v,)
        points.append(SweepPoint(key, aggregate(results[j])))
    return points


def sweep_header(axis: str) -> list[str]:
    cols = ["alpha", "sigma_beta"] if axis == "gm_grid" else [axis]
    cols += [f"mean_loss_{a}_db" for a in CONTROLLED]
    cols += [f"max_loss_{a}_db" for a in CONTROLLED]
    return cols + ["realizations", "flagged_records", "seed"]


def export_sweep(points: list[SweepPoint], axis: str, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(sweep_header(axis))
        for p in points:
            s = p.summary
            w.writerow([repr(float(x)) for x in p.value]
                       + [repr(s.mean[a]) for a in CONTROLLED]
                       + [repr(s.max[a]) for a in CONTROLLED]
                       + [s.realizations, s.n_flagged, s.seed])
