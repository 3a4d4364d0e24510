"""Preset scenarios: constant acceleration, car launch, racing drone, Gauss-Markov."""

from __future__ import annotations

from .config import ScenarioConfig
from .traces import CAR_TRACE, DRONE_TRACE


def ue1(**overrides) -> ScenarioConfig:
    """Constant 20 m/s along x, uniformly accelerated (-4 m/s^2) along y."""
    return ScenarioConfig(name="UE1", **overrides)


def ue2_car(**overrides) -> ScenarioConfig:
    """Synthetic 0-100 km/h launch along -y from rest, analysed over 7-11 s."""
    base = dict(name="UE2", kind="trace", trace_path=CAR_TRACE, duration=11.0,
                window=(7.0, 11.0), initial_pos=(30.0, 150.0, -30.0),
                initial_vel=(0.0, 0.0, 0.0), sigma_n=0.1, realizations=10)
    base.update(overrides)
    return ScenarioConfig(**base)


def ue3_drone(distance: float = 20.0, **overrides) -> ScenarioConfig:
    """Synthetic racing path with x and y swapped, centred ``distance`` m in front
    of the surface and 10 m below it."""
    base = dict(name="UE3", kind="trace", trace_path=DRONE_TRACE, duration=6.0,
                trace_permutation=(1, 0, 2), trace_offset=(distance, 0.0, -10.0),
                sigma_n=0.1, realizations=10)
    base.update(overrides)
    return ScenarioConfig(**base)


def ue4_gauss_markov(alpha: float = 0.5, sigma_beta: float = 1.0, **overrides) -> ScenarioConfig:
    base = dict(name="UE4", kind="gauss_markov", gm_alpha=alpha, gm_sigma_beta=sigma_beta,
                gm_mean_vel=(20.0, -20.0, 0.0), initial_vel=(20.0, -20.0, 0.0),
                realizations=50)
    base.update(overrides)
    return ScenarioConfig(**base)


PRESETS = {"ue1": ue1, "ue2_car": ue2_car, "ue3_drone": ue3_drone,
           "ue4_gauss_markov": ue4_gauss_markov}

GM_ALPHAS = (0.0, 0.5, 0.9, 0.99, 0.999)
GM_SIGMA_BETAS = (0.1, 1.0, 5.0, 20.0)
