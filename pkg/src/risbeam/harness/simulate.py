"""End-to-end simulation: mobility -> localization -> controllers -> delay -> received power.

Four controllers run side by side on the same true trajectory:

* ``ideal``  co-phases the surface on the true position every step, no delay;
* ``naive``  co-phases on each raw measurement, holds it, and is delayed by t_d;
* ``ops`` / ``opa``  predict the position every step from the observer and are
  delayed by t_d, with the predictor advanced by the estimate t_d_hat.

Power is always evaluated at the true position with the effective (delayed)
reflection coefficients. Realizations are simulated as a batch; each owns its
random streams, so results do not depend on how realizations are grouped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..backscatter import LinkBudget, watts_to_dbm
from ..beam_control import DelayLine, delay_depth
from ..em_cell import ReflectionLUT, build_lut
from ..kinematics import (
    STREAM_MEASUREMENT,
    STREAM_MOBILITY,
    MotionState,
    Trace,
    decimation_index,
    gauss_markov_step,
    linear_step,
    make_rng,
    read_trace,
    resample_trace,
    steps_per_measurement,
)
from ..observer import Mode, ObserverState, observer_update, predict_position
from .config import ScenarioConfig
from .traces import shipped_trace_path

APPROACHES = ("ideal", "naive", "ops", "opa")
CONTROLLED = ("naive", "ops", "opa")


@dataclass(eq=False)
class RunSeries:
    """Per-fast-step record of one realization."""

    k: np.ndarray
    t: np.ndarray
    pr_dbm: dict[str, np.ndarray]
    true_pos: np.ndarray
    est_pos: dict[str, np.ndarray]
    realization: int = 0
    seed: int = 0

    def __len__(self) -> int:
        return len(self.k)

    def loss_db(self, approach: str) -> np.ndarray:
        """P_ideal - P_approach in dB; nan where either record is flagged."""
        a, b = self.pr_dbm["ideal"], self.pr_dbm[approach]
        ok = np.isfinite(a) & np.isfinite(b)
        return np.where(ok, a - np.where(ok, b, 0.0), np.nan)

    @property
    def flagged(self) -> np.ndarray:
        """Steps whose received power underflowed in any approach."""
        return ~np.all([np.isfinite(self.pr_dbm[a]) for a in APPROACHES], axis=0)


@dataclass
class LossSummary:
    window: tuple[float, float]
    mean: dict[str, float]
    max: dict[str, float]
    n_records: int
    n_flagged: int
    realizations: int = 1
    seed: int | None = None
    per_step: dict[str, np.ndarray] | None = field(default=None, repr=False)


def power_loss(series: RunSeries, window: tuple[float, float] | None = None,
               keep_per_step: bool = False) -> LossSummary:
    """Mean and max of (P_ideal - P_X) over the steps with t in [start, end)."""
    if window is None:
        window = (float(series.t[0]), float(series.t[-1]) + 1.0)
    t0, t1 = window
    sel = (series.t >= t0 - 1e-12) & (series.t < t1 - 1e-12)
    if not np.any(sel):
        raise ValueError(f"empty analysis window {window}")
    flagged = series.flagged[sel]
    mean, mx, per_step = {}, {}, {}
    for a in CONTROLLED:
        loss = series.loss_db(a)[sel]
        good = loss[~flagged]
        mean[a] = math.fsum(good) / len(good) if len(good) else math.nan
        mx[a] = float(np.max(good)) if len(good) else math.nan
        per_step[a] = loss
    return LossSummary((t0, t1), mean, mx, int(np.count_nonzero(~flagged)),
                       int(np.count_nonzero(flagged)), 1, series.seed,
                       per_step if keep_per_step else None)


def aggregate(summaries: list[LossSummary]) -> LossSummary:
    """Realization-average of per-run mean losses (exactly rounded, order-free)."""
    if not summaries:
        raise ValueError("nothing to aggregate")
    mean = {a: math.fsum(s.mean[a] for s in summaries) / len(summaries) for a in CONTROLLED}
    mx = {a: max(s.max[a] for s in summaries) for a in CONTROLLED}
    return LossSummary(summaries[0].window, mean, mx,
                       sum(s.n_records for s in summaries),
                       sum(s.n_flagged for s in summaries),
                       len(summaries), summaries[0].seed)


@lru_cache(maxsize=8)
def _cached_lut(varactor, cell, v_min, v_max, n) -> ReflectionLUT:
    return build_lut(varactor, cell, v_min, v_max, n)


def scenario_lut(cfg: ScenarioConfig) -> ReflectionLUT:
    return _cached_lut(cfg.varactor, cfg.cell_geometry, cfg.lut_v_min, cfg.lut_v_max,
                       cfg.lut_points)


@lru_cache(maxsize=8)
def _cached_trace(path: str) -> Trace:
    return read_trace(path)


def resolve_trace_path(path: str) -> str:
    """``path`` itself if it exists, else the bundled trace of that name."""
    if Path(path).exists():
        return path
    bundled = shipped_trace_path(Path(path).name)
    if bundled.exists():
        return str(bundled)
    raise FileNotFoundError(f"trace file not found: {path}")


def load_scenario_trace(cfg: ScenarioConfig) -> Trace:
    """The configured trace after the per-axis permutation and offset."""
    tr = _cached_trace(resolve_trace_path(cfg.trace_path))
    return tr.transformed(cfg.trace_permutation, cfg.trace_offset)


def true_trajectories(cfg: ScenarioConfig, realizations) -> np.ndarray:
    """True UE positions, shape (R, K, 3)."""
    realizations = list(realizations)
    K = cfg.n_steps
    T = cfg.step_t
    if cfg.kind == "gauss_markov":
        gm = cfg.gauss_markov
        # Innovations drawn per realization up front: one stream per realization.
        beta = np.stack([gm.sigma_beta * make_rng(cfg.seed, r, STREAM_MOBILITY).normal(size=(K, 3))
                         for r in realizations])
        pos = np.empty((len(realizations), K, 3))
        p = np.broadcast_to(np.asarray(cfg.initial_pos), (len(realizations), 3)).copy()
        v = np.broadcast_to(np.asarray(cfg.initial_vel), (len(realizations), 3)).copy()
        pos[:, 0] = p
        for k in range(1, K):
            p, v = gauss_markov_step(p, v, gm, T, beta=beta[:, k])
            pos[:, k] = p
        return pos

    if cfg.kind == "trace":
        tr = load_scenario_trace(cfg)
        grid = resample_trace(tr, T, cfg.trace_method)
        K = min(K, len(grid))
        if tr.kind == "position":
            traj = grid[:K]
        else:
            traj = _integrate(cfg, lambda k: grid[k], K)
    else:
        accel = np.asarray(cfg.accel)
        traj = _integrate(cfg, lambda k: accel, K)
    return np.broadcast_to(traj, (len(realizations),) + traj.shape)


def _integrate(cfg: ScenarioConfig, accel_at, K: int) -> np.ndarray:
    out = np.empty((K, 3))
    s = MotionState(cfg.initial_pos, cfg.initial_vel)
    out[0] = s.pos
    for k in range(K - 1):
        s = linear_step(s, accel_at(k), cfg.step_t)
        out[k + 1] = s.pos
    return out


def simulate(cfg: ScenarioConfig, realizations=None, keep_positions: bool = True) -> list[RunSeries]:
    """Run realizations ``realizations`` (default ``range(cfg.realizations)``) as a batch."""
    if realizations is None:
        realizations = range(cfg.realizations)
    realizations = list(realizations)
    R = len(realizations)
    lut = scenario_lut(cfg)
    geom = cfg.array_geometry
    budget = LinkBudget(geom, cfg.r_tx, cfg.p_t, cfg.antenna)
    k0 = geom.k0
    dist_t = budget._dist_t
    gamma_sq = lut.gammas**2
    timing = cfg.timing

    traj = true_trajectories(cfg, realizations)
    K = traj.shape[1]
    n_m = steps_per_measurement(cfg.step_t, cfg.meas_t)
    # exact decimal ratio, matching TimingParams.measurement_fast_index
    j_factor = None if n_m is not None else Fraction(repr(cfg.step_t)) / Fraction(repr(cfg.meas_t))
    n_meas = K // n_m + 1 if n_m else decimation_index(K - 1, j_factor) + 1
    noise = np.stack([make_rng(cfg.seed, r, STREAM_MEASUREMENT).normal(size=(n_meas, 3))
                      for r in realizations])

    depth = delay_depth(cfg.t_d, cfg.step_t)
    # Zero-volt fill: the lowest-voltage LUT entry. Before the first
    # measurement the predictive controllers keep emitting it too.
    v0 = np.argmin(np.abs(lut.voltages - 0.0))
    zero_idx = np.full((R, geom.rows, geom.cols), v0, dtype=np.intp)
    lines = {a: DelayLine(depth, zero_idx) for a in CONTROLLED}
    obs = {"ops": ObserverState.initial((R,)), "opa": ObserverState.initial((R,))}
    naive_idx = zero_idx
    naive_pos = np.full((R, 3), np.nan)

    pr = {a: np.empty((R, K)) for a in APPROACHES}
    est = {a: np.full((R, K, 3), np.nan) for a in CONTROLLED} if keep_positions else {}

    def indices_for(r_est):
        return lut.nearest_index(k0 * (dist_t + geom.distances(r_est)))

    q = -1
    k_q = 0
    for k in range(K):
        pos = traj[:, k]
        q_now = k // n_m if n_m else decimation_index(k, j_factor)
        if q_now > q:
            q = q_now
            k_q = timing.measurement_fast_index(q)
            y = pos + cfg.sigma_n * noise[:, q]
            for a, mode in (("ops", Mode.OPS), ("opa", Mode.OPA)):
                obs[a] = observer_update(obs[a], y, mode, cfg.meas_t)
            naive_idx = indices_for(y)
            naive_pos = y

        # A UE that wanders behind the surface has no reflected link; such
        # steps are recorded as zero power (flagged) rather than aborting.
        behind = pos[:, 0] <= 0
        if np.any(behind):
            pos = np.where(behind[:, None], np.abs(pos) + [1.0, 0.0, 0.0], pos)
        w, dist_r = budget.weights(pos, return_distances=True)
        if np.any(behind):
            w = np.where(behind[:, None, None], 0.0, w)
        ideal_idx = lut.nearest_index(k0 * (dist_t + dist_r))
        pr["ideal"][:, k] = budget.power_from_squares(w, gamma_sq[ideal_idx])

        if q >= 0:
            t_adv = (k - k_q) * cfg.step_t + cfg.t_d_hat
            r_hat = {a: predict_position(obs[a], t_adv, a.upper()) for a in ("ops", "opa")}
            new_idx = {"ops": indices_for(r_hat["ops"]), "opa": indices_for(r_hat["opa"]),
                       "naive": naive_idx}
            r_hat["naive"] = naive_pos
        else:
            new_idx = {a: zero_idx for a in CONTROLLED}
            r_hat = {}
        for a in CONTROLLED:
            eff = lines[a].apply(new_idx[a])
            pr[a][:, k] = budget.power_from_squares(w, gamma_sq[eff])
            # Estimates are filed under the step at which they take effect.
            if keep_positions and a in r_hat and k + depth < K:
                est[a][:, k + depth] = r_hat[a]

    k_idx = np.arange(K)
    t = k_idx * cfg.step_t
    out = []
    for i, r in enumerate(realizations):
        out.append(RunSeries(
            k=k_idx,
            t=t,
            pr_dbm={a: watts_to_dbm(pr[a][i]) for a in APPROACHES},
            true_pos=np.array(traj[i]),
            est_pos={a: est[a][i] for a in est},
            realization=r,
            seed=cfg.seed,
        ))
    return out


def run_scenario(cfg: ScenarioConfig, realization_index: int = 0) -> RunSeries:
    return simulate(cfg, [realization_index])[0]
