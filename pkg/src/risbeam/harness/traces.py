"""Synthetic substitute traces for the car and drone scenarios.

The measured datasets behind those scenarios are external. These generators
produce clearly synthetic stand-ins with the same character: a 0-100 km/h
style launch along -y, and an aggressive 3-D racing path with peak
accelerations above 50 m/s^2. Any trace in the documented CSV format can be
used instead.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from ..kinematics import Trace, write_trace

CAR_TRACE = "car_accel_synthetic.csv"
DRONE_TRACE = "drone_path_synthetic.csv"


def car_acceleration_profile(t):
    """Longitudinal acceleration (m/s^2) of a synthetic 0-100 km/h launch.

    Ramps to 6 m/s^2 in 0.3 s, holds until 2 s, then tapers to zero at 11 s.
    The integral over [0, 11] s is about 27.8 m/s (100 km/h).
    """
    t = np.asarray(t, dtype=float)
    ramp = 6.0 * np.clip(t / 0.3, 0.0, 1.0)
    taper = 6.0 * np.clip(1.0 - (t - 2.0) / 9.0, 0.0, 1.0) ** 2.23
    return np.where(t < 2.0, ramp, taper)


def car_trace(rate_hz: float = 100.0, duration: float = 11.0) -> Trace:
    t = np.arange(int(round(duration * rate_hz)) + 1) / rate_hz
    a = car_acceleration_profile(t)
    values = np.stack([np.zeros_like(a), -a, np.zeros_like(a)], axis=-1)
    return Trace(t, values, kind="acceleration")


def drone_position(t):
    """Synthetic racing-drone path centred on the origin, long axis along x."""
    t = np.asarray(t, dtype=float)
    x = 25.0 * np.sin(2 * np.pi * t / 6.0)
    y = 3.0 * np.sin(2 * np.pi * t / 1.5 + 0.3)
    z = 2.0 * np.sin(2 * np.pi * t / 2.5)
    return np.stack([x, y, z], axis=-1)


def drone_trace(rate_hz: float = 500.0, duration: float = 6.0) -> Trace:
    t = np.arange(int(round(duration * rate_hz)) + 1) / rate_hz
    return Trace(t, drone_position(t), kind="position")


def shipped_trace_path(name: str) -> Path:
    """Filesystem path of a trace bundled with the package."""
    return Path(str(resources.files("risbeam.data").joinpath(name)))


def write_shipped_traces(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name, tr in ((CAR_TRACE, car_trace()), (DRONE_TRACE, drone_trace())):
        path = directory / name
        write_trace(tr, path)
        out.append(path)
    return out
