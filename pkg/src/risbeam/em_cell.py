"""Varactor-loaded RIS unit cell: impedance model, reflection coefficient and LUT.

The cell is a capacitive patch array over a grounded dielectric slab, with a
varactor bridging each gap. All impedances are per-cell surface impedances in
ohms; the reflection coefficient is referenced to free space.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from scipy import constants

SPEED_OF_LIGHT = constants.c
EPS0 = constants.epsilon_0
MU0 = constants.mu_0
ETA0 = float(np.sqrt(MU0 / EPS0))

LUT_CSV_HEADER = ["voltage_V", "gamma_re", "gamma_im", "gamma_mag", "gamma_phase_rad"]


class DegenerateGeometryError(ValueError):
    """Raised when the cell geometry collapses a branch to an open circuit."""


class OpenCellError(ValueError):
    """Raised when every parallel branch of the cell is an open circuit."""


def wrap_phase(phi):
    """Wrap angles into [-pi, pi)."""
    return np.mod(np.asarray(phi) + np.pi, 2 * np.pi) - np.pi


@dataclass(frozen=True)
class VaractorParams:
    """SMV1705 defaults."""

    c_j0: float = 31e-12
    v_j: float = 3.0
    grading: float = 2.0
    r_s: float = 0.32
    l_s: float = 1.7e-9
    c_p: float = 0.0
    topology: Literal["series", "parallel"] = "series"

    def __post_init__(self):
        if self.c_j0 <= 0 or self.v_j <= 0 or self.grading <= 0:
            raise ValueError("c_j0, v_j and grading must be positive")
        if self.r_s < 0 or self.l_s < 0 or self.c_p < 0:
            raise ValueError("r_s, l_s and c_p must be non-negative")
        if self.topology not in ("series", "parallel"):
            raise ValueError(f"unknown varactor topology {self.topology!r}")


@dataclass(frozen=True)
class CellGeometry:
    """Unit-cell geometry at a single carrier.

    ``lattice_d`` defaults to half a wavelength. ``patch_medium`` selects the
    effective permittivity seen by the gap capacitance: ``"embedded"`` uses
    Re(eps_r) (patches inside the substrate), ``"interface"`` uses the
    air/substrate average (Re(eps_r) + 1) / 2.
    """

    freq: float = 3.5e9
    lattice_d: float | None = None
    gap_g: float = 1e-3
    slab_d: float = 1.57e-3
    eps_r: complex = 4.4 - 0.088j
    patch_medium: Literal["embedded", "interface"] = "embedded"
    wavelength: float = field(init=False)
    k0: float = field(init=False)
    omega: float = field(init=False)

    def __post_init__(self):
        if self.freq <= 0:
            raise ValueError("freq must be positive")
        lam = SPEED_OF_LIGHT / self.freq
        object.__setattr__(self, "wavelength", lam)
        object.__setattr__(self, "k0", 2 * np.pi / lam)
        object.__setattr__(self, "omega", 2 * np.pi * self.freq)
        if self.lattice_d is None:
            object.__setattr__(self, "lattice_d", lam / 2)
        object.__setattr__(self, "eps_r", complex(self.eps_r))
        if self.slab_d <= 0:
            raise ValueError("slab_d must be positive")
        if self.eps_r.real < 1:
            raise ValueError("real(eps_r) must be >= 1")
        if not 0 < self.gap_g <= self.lattice_d:
            raise ValueError("gap_g must satisfy 0 < gap_g < lattice_d")
        if self.patch_medium not in ("embedded", "interface"):
            raise ValueError(f"unknown patch_medium {self.patch_medium!r}")

    @property
    def eps_eff(self) -> float:
        if self.patch_medium == "embedded":
            return self.eps_r.real
        return (self.eps_r.real + 1) / 2


def junction_capacitance(v_rev, p: VaractorParams):
    """Junction capacitance C_j0 (1 + V/V_j)^-G for reverse bias ``v_rev`` >= 0."""
    v = np.asarray(v_rev, dtype=float)
    if np.any(v < 0):
        raise ValueError("forward bias is not modeled: v_rev must be >= 0")
    return p.c_j0 * (1 + v / p.v_j) ** (-p.grading)


def _parallel(*zs):
    # Infinite impedances contribute zero admittance; a zero branch shorts the node.
    zs = np.broadcast_arrays(*[np.asarray(z, dtype=complex) for z in zs])
    short = np.zeros(zs[0].shape, dtype=bool)
    y = np.zeros(zs[0].shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for z in zs:
            short |= z == 0
            y = y + np.where(np.isinf(z), 0, 1 / np.where(z == 0, 1, z))
    if np.any(~short & (y == 0)):
        raise OpenCellError("all parallel branches are open circuits")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(short, 0, 1 / np.where(y == 0, 1, y))
    return out if out.ndim else complex(out)


def varactor_impedance(c_var, g: CellGeometry, p: VaractorParams):
    """Impedance of the packaged varactor at the carrier.

    Default topology is the physical series branch R_s + jwL_s + 1/(jwC)
    shunted by the package capacitance. ``p.topology == "parallel"`` composes
    every element in parallel instead.
    """
    c = np.asarray(c_var, dtype=float)
    if np.any(c <= 0):
        raise ValueError("c_var must be positive")
    w = g.omega
    z_c = 1 / (1j * w * c)
    z_pkg = np.inf if p.c_p == 0 else 1 / (1j * w * p.c_p)
    if p.topology == "series":
        z_branch = p.r_s + 1j * w * p.l_s + z_c
        if p.c_p == 0:
            return z_branch if z_branch.ndim else complex(z_branch)
        return _parallel(z_branch, z_pkg)
    return _parallel(p.r_s, 1j * w * p.l_s, z_c, z_pkg)


def surface_impedances(g: CellGeometry) -> tuple[complex, complex]:
    """Patch-array and grounded-slab impedances ``(z_patch, z_slab)``."""
    x = np.pi * g.gap_g / (2 * g.lattice_d)
    log_csc = -np.log(np.sin(x))
    if log_csc <= 1e-12:
        raise DegenerateGeometryError(
            "gap_g -> lattice_d: grid capacitance vanishes (open-circuit patch)"
        )
    c_grid = 2 * g.lattice_d * EPS0 * g.eps_eff / np.pi * log_csc
    z_patch = 1 / (1j * g.omega * c_grid)
    n = np.sqrt(g.eps_r)
    z_slab = 1j * (ETA0 / n) * np.tan(g.k0 * n * g.slab_d)
    return complex(z_patch), complex(z_slab)


def cell_impedance(z_var, z_patch, z_slab):
    """Three-way parallel combination of the cell branches."""
    return _parallel(z_var, z_patch, z_slab)


def reflection_coefficient(z_cell, g: CellGeometry | None = None):
    """Free-space reflection coefficient of a cell with impedance ``z_cell``."""
    z = np.asarray(z_cell, dtype=complex)
    with np.errstate(invalid="ignore"):
        gamma = np.where(np.isinf(z), 1.0 + 0j, (z - ETA0) / (z + ETA0))
    if np.any(~np.isinf(z) & (z + ETA0 == 0)):
        raise ValueError("z_cell + eta0 == 0")
    return gamma if gamma.ndim else complex(gamma)


def gamma_of_voltage(v_rev, p: VaractorParams, g: CellGeometry):
    """Reflection coefficient of the cell for reverse bias ``v_rev``."""
    z_patch, z_slab = surface_impedances(g)
    z_var = varactor_impedance(junction_capacitance(v_rev, p), g, p)
    return reflection_coefficient(cell_impedance(z_var, z_patch, z_slab), g)


@dataclass(frozen=True, eq=False)
class ReflectionLUT:
    """Sampled voltage -> reflection coefficient table."""

    voltages: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        v = np.array(self.voltages, dtype=float)
        gm = np.array(self.gammas, dtype=complex)
        if v.ndim != 1 or v.shape != gm.shape:
            raise ValueError("voltages and gammas must be 1-D with equal length")
        if len(v) < 2:
            raise ValueError("a LUT needs at least two entries")
        if np.any(np.diff(v) <= 0):
            raise ValueError("voltages must be strictly increasing")
        if np.any(np.abs(gm) > 1 + 1e-12):
            raise ValueError("|gamma| > 1: table is not passive")
        v.flags.writeable = False
        gm.flags.writeable = False
        object.__setattr__(self, "voltages", v)
        object.__setattr__(self, "gammas", gm)
        # Sorted phase index for O(log n) circular nearest lookup.
        phases = np.angle(gm)
        order = np.lexsort((np.arange(len(v)), phases))
        object.__setattr__(self, "_phases", phases)
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_sorted_phases", phases[order])

    def __len__(self):
        return len(self.voltages)

    @property
    def phases(self) -> np.ndarray:
        return self._phases

    def nearest_index(self, desired_phase):
        """Index of the entry with minimal circular phase distance.

        Ties go to the lower voltage. Works elementwise on arrays. A uniform
        bin table answers every query whose bin holds no decision boundary;
        the rest go through the exact sorted search.
        """
        want = np.asarray(desired_phase, dtype=float)
        if want.ndim == 0:
            return int(self.nearest_index(want[None])[0])
        table, ambiguous = self._bin_table()
        # Bins are periodic, so unwrapped phases index the table directly.
        b = np.floor((want + np.pi) * (self._N_BINS / (2 * np.pi))).astype(np.int64)
        b &= self._N_BINS - 1
        out = table[b]
        amb = ambiguous[b]
        if np.any(amb):
            out[amb] = self._exact_nearest(wrap_phase(want[amb]))
        return out

    _N_BINS = 1 << 18

    def _exact_nearest(self, want):
        sp, order = self._sorted_phases, self._order
        n = len(sp)
        pos = np.searchsorted(sp, want)
        # Candidates: the neighbours on either side, with wrap-around. Runs of
        # equal phase are voltage-ordered by the lexsort; take the run's head.
        hi = order[pos % n]
        lo = order[np.searchsorted(sp, sp[(pos - 1) % n])]
        d_hi = np.abs(wrap_phase(self._phases[hi] - want))
        d_lo = np.abs(wrap_phase(self._phases[lo] - want))
        pick_lo = (d_lo < d_hi) | ((d_lo == d_hi) & (lo < hi))
        return np.where(pick_lo, lo, hi)

    def _bin_table(self):
        cached = self.__dict__.get("_table")
        if cached is not None:
            return cached
        nb = self._N_BINS
        width = 2 * np.pi / nb
        centers = -np.pi + (np.arange(nb) + 0.5) * width
        table = self._exact_nearest(centers)
        # Voronoi boundaries on the circle sit midway between sorted neighbours.
        sp = self._sorted_phases
        nxt = np.append(sp[1:], sp[0] + 2 * np.pi)
        mids = wrap_phase(0.5 * (sp + nxt))
        ambiguous = np.zeros(nb, dtype=bool)
        eps = 1e-9
        for shift in (-eps, 0.0, eps):
            m = wrap_phase(mids + shift)
            ambiguous[np.clip(((m + np.pi) / width).astype(np.intp), 0, nb - 1)] = True
        # Queries that wrap to exactly -pi land in bin 0; keep both ends exact.
        ambiguous[0] = ambiguous[-1] = True
        object.__setattr__(self, "_table", (table, ambiguous))
        return table, ambiguous

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(LUT_CSV_HEADER)
            for v, gm in zip(self.voltages, self.gammas):
                w.writerow([repr(float(v)), repr(float(gm.real)), repr(float(gm.imag)),
                            repr(float(abs(gm))), repr(float(np.angle(gm)))])

    @classmethod
    def from_csv(cls, path) -> "ReflectionLUT":
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != LUT_CSV_HEADER:
                raise ValueError(f"{path}: unexpected LUT header {header}")
            rows = [(float(r[0]), complex(float(r[1]), float(r[2]))) for r in reader]
        v, gm = zip(*rows)
        return cls(np.array(v), np.array(gm))


def build_lut(
    p: VaractorParams | None = None,
    g: CellGeometry | None = None,
    v_min: float = 0.0,
    v_max: float = 20.0,
    n_points: int = 4096,
) -> ReflectionLUT:
    """Tabulate the cell reflection coefficient over a reverse-bias sweep."""
    p = p or VaractorParams()
    g = g or CellGeometry()
    if not 0 <= v_min < v_max:
        raise ValueError("need 0 <= v_min < v_max")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    v = np.linspace(v_min, v_max, n_points)
    return ReflectionLUT(v, gamma_of_voltage(v, p, g))


def lookup_voltage(lut: ReflectionLUT, desired_phase: float) -> tuple[float, complex]:
    """Voltage whose tabulated phase is circularly nearest to ``desired_phase``."""
    if len(lut) == 0:
        raise ValueError("empty LUT")
    i = int(lut.nearest_index(desired_phase))
    return float(lut.voltages[i]), complex(lut.gammas[i])
