"""Kinematic observers and predictors (OPS: speed only, OPA: speed and acceleration).

The observer runs once per low-rate position measurement; the predictor runs
every fast step and extrapolates the last measurement forward by the time
elapsed since it plus the estimated control delay. States broadcast over any
leading batch shape, so one ``ObserverState`` can carry many realizations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kinematics import steps_per_measurement


class Mode(str, enum.Enum):
    OPS = "OPS"
    OPA = "OPA"


@dataclass(frozen=True)
class ObserverState:
    """Last three measurements (newest first) and the current derivative estimates."""

    y_a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    y_b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    y_c: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))
    a_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q: int = -1

    @classmethod
    def initial(cls, batch_shape=()) -> "ObserverState":
        z = np.zeros(tuple(batch_shape) + (3,))
        return cls(z, z, z, z, z, -1)


@dataclass(frozen=True)
class TimingParams:
    step_t: float = 1e-3
    meas_t: float = 0.1
    t_d_hat: float = 0.02
    t_d_true: float = 0.02

    def __post_init__(self):
        if not 0 < self.step_t <= self.meas_t:
            raise ValueError("need 0 < step_t <= meas_t")
        if self.t_d_hat < 0 or self.t_d_true < 0:
            raise ValueError("delays must be >= 0")

    @property
    def j_factor(self) -> float:
        return self.step_t / self.meas_t

    def measurement_fast_index(self, q: int) -> int:
        """floor(q / J): the fast index at which measurement ``q`` arrived."""
        n = steps_per_measurement(self.step_t, self.meas_t)
        if n is not None:
            return q * n
        # decimal reading of the periods so 0.0255 / 0.001 is exactly 25.5
        return int(np.floor(q * Fraction(repr(self.meas_t)) / Fraction(repr(self.step_t))))


def observer_update(st: ObserverState, meas, mode: Mode | str, meas_t: float) -> ObserverState:
    mode = Mode(mode)
    q = st.q + 1
    y_c, y_b, y_a = st.y_b, st.y_a, np.asarray(meas, dtype=float)
    v_hat, a_hat = st.v_hat, st.a_hat
    if q == 0:
        v_hat = np.zeros_like(y_a)
        a_hat = np.zeros_like(y_a)
    elif q == 1 or mode is Mode.OPS:
        v_hat = (y_a - y_b) / meas_t
    else:
        v_hat = (3 * y_a - 4 * y_b + y_c) / (2 * meas_t)
        a_hat = (y_a - 2 * y_b + y_c) / meas_t**2
    return ObserverState(y_a, y_b, y_c, v_hat, a_hat, q)


def time_advance(k: int, st: ObserverState, tp: TimingParams) -> float:
    """Time between the last measurement and the instant the RIS update lands."""
    if st.q < 0:
        raise ValueError("no measurement received yet")
    k_q = tp.measurement_fast_index(st.q)
    if k < k_q:
        raise ValueError(f"fast index {k} precedes the last measurement at {k_q}")
    return (k - k_q) * tp.step_t + tp.t_d_hat


def predict_position(st: ObserverState, t_adv: float, mode: Mode | str) -> np.ndarray:
    if st.q < 0:
        raise ValueError("no measurement received yet")
    if Mode(mode) is Mode.OPS:
        return st.y_a + st.v_hat * t_adv
    return st.y_a + st.v_hat * t_adv + 0.5 * st.a_hat * t_adv**2

