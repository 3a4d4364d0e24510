"""UE motion models, noisy low-rate localization and fast/slow index mapping."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline

STREAM_MEASUREMENT = 0
STREAM_MOBILITY = 1


def make_rng(master_seed: int, realization: int, stream: int) -> np.random.Generator:
    """Generator for one (realization, stream) pair, independent of run order."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(realization, stream))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class MotionState:
    pos: np.ndarray
    vel: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.pos, dtype=float)
        vel = np.asarray(self.vel, dtype=float)
        if pos.shape[-1:] != (3,) or vel.shape != pos.shape:
            raise ValueError("pos and vel must be 3-vectors of equal shape")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(vel))):
            raise ValueError("motion state must be finite")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "vel", vel)

    @classmethod
    def from_vector(cls, x) -> "MotionState":
        x = np.asarray(x, dtype=float)
        return cls(x[..., :3], x[..., 3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.pos, self.vel], axis=-1)


@dataclass(frozen=True)
class LinearModel:
    """Constant-acceleration transition x[k+1] = A x[k] + B u[k]."""

    step_t: float

    def __post_init__(self):
        if self.step_t <= 0:
            raise ValueError("step_t must be positive")

    @property
    def A(self) -> np.ndarray:
        a = np.eye(6)
        a[:3, 3:] = self.step_t * np.eye(3)
        return a

    @property
    def B(self) -> np.ndarray:
        return np.vstack([0.5 * self.step_t**2 * np.eye(3), self.step_t * np.eye(3)])


def linear_step(s: MotionState, accel, step_t: float) -> MotionState:
    if step_t <= 0:
        raise ValueError("step_t must be positive")
    a = np.asarray(accel, dtype=float)
    return MotionState(s.pos + s.vel * step_t + 0.5 * a * step_t**2, s.vel + a * step_t)


@dataclass(frozen=True)
class MeasurementModel:
    """Position-only measurement with i.i.d. Gaussian noise per axis."""

    sigma_n: float = 0.0

    def __post_init__(self):
        if self.sigma_n < 0:
            raise ValueError("sigma_n must be >= 0")

    @property
    def C(self) -> np.ndarray:
        return np.hstack([np.eye(3), np.zeros((3, 3))])

    @property
    def R(self) -> np.ndarray:
        return self.sigma_n**2 * np.eye(3)


def measure(s: MotionState, m: MeasurementModel, rng: np.random.Generator) -> np.ndarray:
    noise = rng.normal(0.0, 1.0, size=s.pos.shape)
    return s.pos + m.sigma_n * noise


def decimation_index(k: int, j_factor) -> int:
    """Slow index floor(J k). ``j_factor`` may be a Fraction for exact arithmetic."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if not 0 < j_factor <= 1:
        raise ValueError("j_factor must lie in (0, 1]")
    if isinstance(j_factor, Fraction):
        return (k * j_factor.numerator) // j_factor.denominator
    return int(np.floor(j_factor * k))


def steps_per_measurement(step_t: float, meas_t: float) -> int | None:
    """Integral T_M / T when it exists (to 1e-9 relative), else None."""
    ratio = meas_t / step_t
    n = round(ratio)
    if n >= 1 and abs(ratio - n) <= 1e-9 * ratio:
        return n
    return None


@dataclass(frozen=True)
class GaussMarkovParams:
    alpha: float
    mean_vel: np.ndarray
    sigma_beta: float

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if self.sigma_beta < 0:
            raise ValueError("sigma_beta must be >= 0")
        object.__setattr__(self, "mean_vel", np.asarray(self.mean_vel, dtype=float))

    @property
    def R_beta(self) -> np.ndarray:
        return self.sigma_beta**2 * np.eye(3)


def gauss_markov_step(prev_pos, prev_vel, p: GaussMarkovParams, step_t: float,
                      rng: np.random.Generator | None = None, beta=None):
    """One Gauss-Markov update; pass ``beta`` to supply the innovation directly."""
    if beta is None:
        beta = p.sigma_beta * rng.normal(size=np.shape(prev_vel))
    vel = (p.alpha * np.asarray(prev_vel) + (1 - p.alpha) * p.mean_vel
           + np.sqrt(1 - p.alpha**2) * beta)
    return np.asarray(prev_pos) + vel * step_t, vel


@dataclass(frozen=True, eq=False)
class Trace:
    """Timestamped 3-vectors: positions (``kind="position"``) or accelerations."""

    times: np.ndarray
    values: np.ndarray
    kind: Literal["position", "acceleration"] = "position"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.shape != (len(t), 3):
            raise ValueError("times must be 1-D and values (n, 3)")
        if len(t) < 2:
            raise ValueError("a trace needs at least two samples")
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise TraceError(f"times not strictly increasing at sample {bad[0] + 1}",
                             row=int(bad[0]) + 1)
        if self.kind not in ("position", "acceleration"):
            raise ValueError(f"unknown trace kind {self.kind!r}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def positions(self) -> np.ndarray:
        return self.values

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def transformed(self, permutation=(0, 1, 2), offset=(0.0, 0.0, 0.0)) -> "Trace":
        """Per-axis permutation (output axis i takes input axis perm[i]) plus offset."""
        perm = list(permutation)
        if sorted(perm) != [0, 1, 2]:
            raise ValueError(f"invalid axis permutation {permutation}")
        v = self.values[:, perm]
        if self.kind == "position":
            v = v + np.asarray(offset, dtype=float)
        return Trace(self.times, v, self.kind)


class TraceError(ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


POSITION_HEADER = ["t", "x", "y", "z"]
ACCEL_HEADER = ["t", "ax", "ay", "az"]


def read_trace(path) -> Trace:
    """Load a trace CSV; the header decides position vs acceleration."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise TraceError(f"{path}: empty file", row=0) from None
        if header == POSITION_HEADER:
            kind = "position"
        elif header == ACCEL_HEADER:
            kind = "acceleration"
        else:
            raise TraceError(f"{path}: header must be {POSITION_HEADER} or "
                             f"{ACCEL_HEADER}, got {header}", row=1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise TraceError(f"{path}:{lineno}: expected 4 fields, got {len(row)}",
                                 row=lineno)
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise TraceError(f"{path}:{lineno}: {exc}", row=lineno) from None
    data = np.array(rows, dtype=float).reshape(-1, 4)
    bad = np.flatnonzero(np.diff(data[:, 0]) <= 0)
    if bad.size:
        lineno = int(bad[0]) + 3  # header is line 1, data starts at 2
        raise TraceError(f"{path}:{lineno}: time is not strictly increasing", row=lineno)
    return Trace(data[:, 0], data[:, 1:], kind)


def write_trace(tr: Trace, path) -> None:
    header = POSITION_HEADER if tr.kind == "position" else ACCEL_HEADER
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for t, v in zip(tr.times, tr.values):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in v])


def resample_trace(tr: Trace, step_t: float,
                   method: Literal["linear", "cubic-spline"] = "cubic-spline") -> np.ndarray:
    """Interpolate ``tr`` onto the uniform grid times[0] + k*step_t within the span."""
    if step_t <= 0:
        raise ValueError("step_t must be positive")
    t0 = tr.times[0]
    n = int(np.floor(tr.duration / step_t * (1 + 1e-12))) + 1
    grid = t0 + step_t * np.arange(n)
    if method == "linear":
        out = np.column_stack([np.interp(grid, tr.times, tr.values[:, i]) for i in range(3)])
    elif method == "cubic-spline":
        out = CubicSpline(tr.times, tr.values, axis=0)(grid)
    else:
        raise ValueError(f"unknown resampling method {method!r}")
    # Snap grid points that coincide with knots onto the knot values exactly.
    idx = np.searchsorted(tr.times, grid)
    idx = np.clip(idx, 0, len(tr.times) - 1)
    hit = np.abs(tr.times[idx] - grid) <= 1e-9 * max(step_t, 1.0)
    out[hit] = tr.values[idx[hit]]
    return out
