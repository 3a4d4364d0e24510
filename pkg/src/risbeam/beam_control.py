"""Per-cell phase targets, LUT voltage mapping and the control-delay line."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Any

import numpy as np

from .em_cell import ReflectionLUT, wrap_phase


class CoincidentPositionError(ValueError):
    """A cell sits exactly on the TX or RX position."""


def path_lengths(point, cells):
    """Distances |point - cell| for every cell; ``point`` may carry batch axes."""
    point = np.asarray(point, dtype=float)
    d = cells - point[..., None, None, :]
    return np.sqrt(np.einsum("...i,...i->...", d, d))


def optimal_phase_matrix(r_tx, r_rx_est, cells, k0: float) -> np.ndarray:
    """Co-phasing reflection phase wrap(k0 (|r_tx - c| + |r_rx - c|)) per cell.

    ``cells`` is (M, N, 3). ``r_rx_est`` may be (..., 3), giving (..., M, N).
    """
    cells = np.asarray(cells, dtype=float)
    d_t = path_lengths(r_tx, cells)
    d_r = path_lengths(r_rx_est, cells)
    if np.any(d_t == 0) or np.any(d_r == 0):
        raise CoincidentPositionError("TX or RX coincides with a cell position")
    return wrap_phase(k0 * (d_t + d_r))


@dataclass(frozen=True, eq=False)
class VoltageMatrix:
    """LUT entries chosen per cell, with their voltages and realized gammas."""

    index: np.ndarray
    lut: ReflectionLUT

    @property
    def voltages(self) -> np.ndarray:
        return self.lut.voltages[self.index]

    @property
    def gammas(self) -> np.ndarray:
        return self.lut.gammas[self.index]

    @classmethod
    def uniform(cls, lut: ReflectionLUT, shape, index: int = 0) -> "VoltageMatrix":
        return cls(np.full(shape, index, dtype=np.intp), lut)


def phases_to_voltages(lut: ReflectionLUT, phases) -> VoltageMatrix:
    return VoltageMatrix(lut.nearest_index(phases), lut)


def delay_depth(t_d: float, step_t: float) -> int:
    ratio = t_d / step_t
    d = int(round(ratio))
    if abs(ratio - d) > 1e-9 * max(ratio, 1.0):
        warnings.warn(f"t_d / T = {ratio:g} is not integral; rounding delay to {d} steps",
                      stacklevel=2)
    return d


class DelayLine:
    """Fixed-depth FIFO: the output at step k is the input pushed at step k - depth.

    Until ``depth`` inputs have been pushed, the initial fill is returned.
    """

    def __init__(self, depth: int, initial: Any):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.depth = depth
        self.initial = initial
        self._buf: deque = deque()

    def apply(self, item):
        if self.depth == 0:
            return item
        self._buf.append(item)
        if len(self._buf) > self.depth:
            return self._buf.popleft()
        return self.initial


def delay_apply(dl: DelayLine, item):
    return dl.apply(item)
