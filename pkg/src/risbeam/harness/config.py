"""Scenario configuration and its YAML file format.

A config file groups the flat ``ScenarioConfig`` fields into sections
(``scenario``, ``motion``, ``trace``, ``gauss_markov``, ``timing``,
``localization``, ``ris``, ``link``, ``run``). Every value is in SI units.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Literal

import yaml

from ..backscatter import AntennaConfig, ArrayGeometry
from ..em_cell import CellGeometry, VaractorParams
from ..kinematics import GaussMarkovParams
from ..observer import TimingParams


class ConfigError(ValueError):
    """Invalid or malformed scenario configuration."""


Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class ScenarioConfig:
    # scenario
    name: str = "UE1"
    kind: Literal["linear", "trace", "gauss_markov"] = "linear"
    duration: float = 3.0
    window: tuple[float, float] | None = None
    # motion (linear and acceleration-trace scenarios)
    initial_pos: Vec3 = (10.0, 50.0, -30.0)
    initial_vel: Vec3 = (20.0, 0.0, 0.0)
    accel: Vec3 = (0.0, -4.0, 0.0)
    # trace
    trace_path: str | None = None
    trace_method: Literal["linear", "cubic-spline"] = "cubic-spline"
    trace_permutation: tuple[int, int, int] = (0, 1, 2)
    trace_offset: Vec3 = (0.0, 0.0, 0.0)
    # gauss_markov
    gm_alpha: float = 0.5
    gm_mean_vel: Vec3 = (20.0, -20.0, 0.0)
    gm_sigma_beta: float = 1.0
    # timing
    step_t: float = 1e-3
    meas_t: float = 0.1
    t_d: float = 0.02
    t_d_hat: float = 0.02
    # localization
    sigma_n: float = 0.0
    # ris
    rows: int = 30
    cols: int = 30
    freq: float = 3.5e9
    lut_v_min: float = 0.0
    lut_v_max: float = 20.0
    lut_points: int = 4096
    patch_medium: Literal["embedded", "interface"] = "embedded"
    varactor_topology: Literal["series", "parallel"] = "series"
    # link
    r_tx: Vec3 = (100.0, -100.0, 0.0)
    p_t: float = 50.0
    directivity_exponent: float = 100.0
    # run
    realizations: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("initial_pos", "initial_vel", "accel", "trace_offset",
                     "gm_mean_vel", "r_tx"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        object.__setattr__(self, "trace_permutation",
                           tuple(int(x) for x in self.trace_permutation))
        if self.window is not None:
            object.__setattr__(self, "window", tuple(float(x) for x in self.window))
        self.validate()

    def validate(self) -> None:
        if self.kind not in ("linear", "trace", "gauss_markov"):
            raise ConfigError(f"scenario.kind: unknown kind {self.kind!r}")
        if self.duration <= 0:
            raise ConfigError("scenario.duration: must be > 0")
        if self.realizations < 1:
            raise ConfigError("run.realizations: must be >= 1")
        if self.kind == "trace" and not self.trace_path:
            raise ConfigError("trace.path: required for kind 'trace'")
        if sorted(self.trace_permutation) != [0, 1, 2]:
            raise ConfigError(f"trace.permutation: {self.trace_permutation} is not a permutation")
        if self.sigma_n < 0:
            raise ConfigError("localization.sigma_n: must be >= 0")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ConfigError("scenario.window: start must precede end")
        try:
            self.timing
            self.cell_geometry
            self.varactor
            self.array_geometry
            self.antenna
            if self.kind == "gauss_markov":
                self.gauss_markov
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    # Typed views used by the simulator.
    @property
    def timing(self) -> TimingParams:
        return TimingParams(self.step_t, self.meas_t, self.t_d_hat, self.t_d)

    @property
    def cell_geometry(self) -> CellGeometry:
        return CellGeometry(freq=self.freq, patch_medium=self.patch_medium)

    @property
    def varactor(self) -> VaractorParams:
        return VaractorParams(topology=self.varactor_topology)

    @property
    def array_geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.rows, self.cols, self.freq, self.cell_geometry.lattice_d)

    @property
    def antenna(self) -> AntennaConfig:
        return AntennaConfig(self.directivity_exponent)

    @property
    def gauss_markov(self) -> GaussMarkovParams:
        return GaussMarkovParams(self.gm_alpha, self.gm_mean_vel, self.gm_sigma_beta)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step_t))

    @property
    def analysis_window(self) -> tuple[float, float]:
        """Explicit window, else from the third measurement period to the end."""
        if self.window is not None:
            return self.window
        return (3 * self.meas_t, self.duration)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


SECTIONS: dict[str, tuple[str, ...]] = {
    "scenario": ("name", "kind", "duration", "window"),
    "motion": ("initial_pos", "initial_vel", "accel"),
    "trace": ("trace_path", "trace_method", "trace_permutation", "trace_offset"),
    "gauss_markov": ("gm_alpha", "gm_mean_vel", "gm_sigma_beta"),
    "timing": ("step_t", "meas_t", "t_d", "t_d_hat"),
    "localization": ("sigma_n",),
    "ris": ("rows", "cols", "freq", "lut_v_min", "lut_v_max", "lut_points",
            "patch_medium", "varactor_topology"),
    "link": ("r_tx", "p_t", "directivity_exponent"),
    "run": ("realizations", "seed"),
}

# File keys that differ from field names.
_FILE_KEYS = {"trace_path": "path", "trace_method": "method",
              "trace_permutation": "permutation", "trace_offset": "offset",
              "gm_alpha": "alpha", "gm_mean_vel": "mean_vel",
              "gm_sigma_beta": "sigma_beta"}

_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def config_to_dict(cfg: ScenarioConfig) -> dict:
    out: dict = {}
    for section, names in SECTIONS.items():
        out[section] = {_FILE_KEYS.get(n, n): _plain(getattr(cfg, n)) for n in names}
    return out


def config_from_dict(data: dict, source: str = "<dict>") -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping of sections")
    kwargs = {}
    for section, body in data.items():
        if section not in SECTIONS:
            raise ConfigError(f"{source}: unknown section '{section}'")
        if body is None:
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"{source}: section '{section}' must be a mapping")
        by_key = {_FILE_KEYS.get(n, n): n for n in SECTIONS[section]}
        for key, value in body.items():
            if key not in by_key:
                raise ConfigError(f"{source}: {section}.{key}: unknown field")
            name = by_key[key]
            try:
                kwargs[name] = _coerce(name, value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{source}: {section}.{key}: {exc}") from None
    try:
        return ScenarioConfig(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _coerce(name: str, value):
    t = str(_FIELD_TYPES[name])
    if value is None:
        if "None" in t:
            return None
        raise ValueError("value required")
    if t.startswith("Vec3") or t.startswith("tuple"):
        if not isinstance(value, (list, tuple)):
            raise ValueError(f"expected a list, got {value!r}")
        expected = 2 if name == "window" else 3
        if len(value) != expected:
            raise ValueError(f"expected {expected} entries, got {len(value)}")
        return tuple(value)
    if t == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"expected an integer, got {value!r}")
        return value
    if t == "float":
        if isinstance(value, bool):
            raise ValueError(f"expected a number, got {value!r}")
        return float(value)
    return value


def read_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f":{mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}{where}: malformed YAML: {exc}") from None
    cfg = config_from_dict(data, source=str(path))
    # Relative trace paths resolve against the config file's directory.
    if cfg.trace_path and not Path(cfg.trace_path).is_absolute():
        candidate = path.parent / cfg.trace_path
        if candidate.exists():
            cfg = cfg.replace(trace_path=str(candidate))
    return cfg


def write_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))


__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SECTIONS",
    "config_from_dict",
    "config_to_dict",
    "read_config",
    "write_config",
]
