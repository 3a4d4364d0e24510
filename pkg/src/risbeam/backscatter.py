"""BS -> RIS -> UE backscatter link: angles, cell RCS, antenna gains, received power."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .em_cell import SPEED_OF_LIGHT

DIPOLE_COEFFICIENT = 0.71199


class GeometryError(ValueError):
    """TX/RX placement incompatible with the single-sided surface model."""


@dataclass(frozen=True)
class ArrayGeometry:
    """M x N uniform planar array on the y-z plane, centred at the origin, normal +x.

    ``lattice_d`` defaults to half the carrier wavelength.
    """

    rows: int = 30
    cols: int = 30
    freq: float = 3.5e9
    lattice_d: float | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("array needs at least one row and column")
        if self.freq <= 0:
            raise ValueError("freq must be positive")
        if self.lattice_d is None:
            object.__setattr__(self, "lattice_d", self.wavelength / 2)
        if self.lattice_d <= 0:
            raise ValueError("lattice_d must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.freq

    @property
    def k0(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def cells(self) -> np.ndarray:
        """(M, N, 3) cell centres r_mn = [0, (n - (N+1)/2) D, (m - (M+1)/2) D]."""
        m = np.arange(1, self.rows + 1) - (self.rows + 1) / 2
        n = np.arange(1, self.cols + 1) - (self.cols + 1) / 2
        mm, nn = np.meshgrid(m, n, indexing="ij")
        return np.stack([np.zeros_like(mm), nn * self.lattice_d, mm * self.lattice_d], axis=-1)

    @property
    def normal(self) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0])

    @property
    def cell_y(self) -> np.ndarray:
        return (np.arange(1, self.cols + 1) - (self.cols + 1) / 2) * self.lattice_d

    @property
    def cell_z(self) -> np.ndarray:
        return (np.arange(1, self.rows + 1) - (self.rows + 1) / 2) * self.lattice_d

    def offsets(self, point):
        """Per-cell components of ``point - cell`` for the (…, M, N) grid.

        Returns ``(dx, dy, dz)`` shaped (…, 1, 1), (…, 1, N) and (…, M, 1): the
        grid is separable, so nothing is materialized at full size here.
        """
        p = np.asarray(point, dtype=float)
        dx = p[..., 0, None, None]
        dy = p[..., 1, None, None] - self.cell_y
        dz = p[..., 2, None, None] - self.cell_z[:, None]
        return dx, dy, dz

    def distances(self, point) -> np.ndarray:
        """|point - cell| for every cell, shape (…, M, N)."""
        dx, dy, dz = self.offsets(point)
        return np.sqrt(dx * dx + dy * dy + dz * dz)

    def excess_lengths(self, point, distances=None) -> np.ndarray:
        """|point - cell| - |point| for every cell, without cancellation.

        Uses |p - c| - |p| = |c| (|c| - 2 p.c / |c|) / (|p - c| + |p|), so the
        result keeps full relative accuracy even when both lengths are large.
        """
        p = np.asarray(point, dtype=float)
        if distances is None:
            distances = self.distances(p)
        py = p[..., 1, None, None]
        pz = p[..., 2, None, None]
        cy, cz = self.cell_y, self.cell_z[:, None]
        num = cy * (cy - 2 * py) + cz * (cz - 2 * pz)
        return num / (distances + _norm(p)[..., None, None])


@dataclass(frozen=True)
class AntennaConfig:
    directivity_exponent: float = 100.0
    dipole_coefficient: float = DIPOLE_COEFFICIENT

    def __post_init__(self):
        if self.directivity_exponent < 0:
            raise ValueError("directivity_exponent must be >= 0")


@dataclass(frozen=True)
class LinkAngles:
    theta_t: np.ndarray
    theta_r: np.ndarray
    theta_tx: np.ndarray
    theta_rx: np.ndarray


def _norm(v):
    return np.sqrt(np.einsum("...i,...i->...", v, v))


def _angle_between(a, b):
    cross = np.cross(a, b)
    return np.arctan2(_norm(cross), np.einsum("...i,...i->...", a, b))


def link_angles(cell, r_tx, r_rx) -> LinkAngles:
    """Per-cell incidence/departure angles and antenna angles. Broadcasts over cells."""
    cell = np.asarray(cell, dtype=float)
    r_tx = np.asarray(r_tx, dtype=float)
    r_rx = np.asarray(r_rx, dtype=float)
    if np.any(r_tx[..., 0] <= 0) or np.any(r_rx[..., 0] <= 0):
        raise GeometryError("TX and RX must lie in front of the surface (x > 0)")
    d_t = r_tx - cell
    d_r = r_rx - cell
    x_hat = np.array([1.0, 0.0, 0.0])
    z_hat = np.array([0.0, 0.0, 1.0])
    theta_t = _angle_between(d_t, x_hat)
    theta_r_mag = _angle_between(d_r, x_hat)
    sign = np.where(np.einsum("...i,...i->...", d_r[..., 1:], -d_t[..., 1:]) >= 0, 1.0, -1.0)
    theta_tx = _angle_between(np.broadcast_to(r_tx, d_t.shape), d_t)
    theta_rx = _angle_between(d_r, z_hat)
    return LinkAngles(theta_t, sign * theta_r_mag, theta_tx, theta_rx)


def rcs_tm(theta_t, theta_r, lattice_d: float, wavelength: float):
    """TM-mode cell radar cross-section (unnormalized sinc)."""
    k0 = 2 * np.pi / wavelength
    arg = 0.5 * k0 * lattice_d * (np.sin(theta_r) - np.sin(theta_t))
    peak = 4 * np.pi * lattice_d**4 / wavelength**2
    # np.sinc is the normalized sinc, hence the division by pi.
    return peak * np.cos(theta_t) ** 2 * np.sinc(arg / np.pi) ** 2


@lru_cache(maxsize=64)
def cos_power_integral(exponent: float) -> float:
    """Integral of cos^q over [0, pi/2] by adaptive quadrature."""
    val, _ = integrate.quad(lambda t: np.cos(t) ** exponent, 0.0, np.pi / 2,
                            epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def tx_gain(theta_tx, cfg: AntennaConfig):
    """Normalized cos^q base-station pattern; zero outside the front hemisphere."""
    th = np.asarray(theta_tx, dtype=float)
    c = np.clip(np.cos(th), 0.0, None)
    g = c ** cfg.directivity_exponent / cos_power_integral(float(cfg.directivity_exponent))
    return np.where(np.abs(th) <= np.pi / 2, g, 0.0)


def rx_gain_dipole(theta_rx, cfg: AntennaConfig | None = None):
    """Vertical half-wave dipole pattern; the axial 0/0 is taken as its limit, 0."""
    coef = DIPOLE_COEFFICIENT if cfg is None else cfg.dipole_coefficient
    th = np.asarray(theta_rx, dtype=float)
    return _dipole_from_cos(np.cos(th), coef)


def _dipole_from_cos(c, coef):
    s2 = 1.0 - c * c
    with np.errstate(divide="ignore", invalid="ignore"):
        g = coef * np.cos(0.5 * np.pi * c) ** 2 / s2
    return np.where(s2 > 1e-30, g, 0.0)


def watts_to_dbm(p):
    """10 log10(p / 1 mW); non-positive powers map to -inf."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0, 10 * np.log10(np.where(p > 0, p, 1.0) / 1e-3), -np.inf)
    return out if out.ndim else float(out)


class LinkBudget:
    """Received-power evaluator for a fixed array, carrier, TX and antennas.

    TX-side geometry is computed once. ``weights(r_rx)`` returns complex
    per-cell coefficients w such that P_r = prefactor * |sum(w * gamma**2)|,
    which lets several gamma matrices share one geometry evaluation.

    The path phase in w is taken relative to the array centre: the common
    factor exp(-2j k0 (|r_tx| + |r_rx|)) does not change |sum| and dropping
    it keeps the exponent small, hundreds of radians instead of tens of
    thousands, which is what limits the accuracy of the sum.
    """

    def __init__(self, geom: ArrayGeometry, r_tx, p_t: float,
                 antenna: AntennaConfig | None = None):
        self.geom = geom
        self.wavelength = wavelength = geom.wavelength
        self.k0 = geom.k0
        self.r_tx = np.asarray(r_tx, dtype=float)
        self.p_t = p_t
        self.antenna = antenna or AntennaConfig()
        if self.r_tx[0] <= 0:
            raise GeometryError("TX must lie in front of the surface (x > 0)")
        self.cells = geom.cells
        self.prefactor = p_t * wavelength**2 / (4 * np.pi) ** 2
        d_t = self.r_tx - self.cells
        self._dist_t = geom.distances(self.r_tx)
        if np.any(self._dist_t == 0):
            raise GeometryError("TX coincides with a cell")
        self._sin_t = _norm(d_t[..., 1:]) / self._dist_t
        # Forward-scatter tangent, unnormalized: only its sign against the RX matters.
        self._fwd_tan = -d_t[..., 1:]
        cos_t = d_t[..., 0] / self._dist_t
        theta_tx = _angle_between(np.broadcast_to(self.r_tx, d_t.shape), d_t)
        self._tx_term = (tx_gain(theta_tx, self.antenna) * cos_t**2
                         * 4 * np.pi * geom.lattice_d**4 / wavelength**2 / self._dist_t**2)
        self._half_kd = 0.5 * self.k0 * geom.lattice_d
        self._excess_t = geom.excess_lengths(self.r_tx, self._dist_t)

    def weights(self, r_rx, return_distances: bool = False):
        """Complex per-cell coefficients at ``r_rx`` (…, 3) -> (…, M, N)."""
        r_rx = np.asarray(r_rx, dtype=float)
        if np.any(r_rx[..., 0] <= 0):
            raise GeometryError("RX must lie in front of the surface (x > 0)")
        dx, dy, dz = self.geom.offsets(r_rx)
        tan2 = dy * dy + dz * dz
        dist_r = np.sqrt(dx * dx + tan2)
        if np.any(dist_r == 0):
            raise GeometryError("RX coincides with a cell")
        dot = dy * self._fwd_tan[..., 0] + dz * self._fwd_tan[..., 1]
        sin_r = np.where(dot >= 0, 1.0, -1.0) * np.sqrt(tan2) / dist_r
        x = self._half_kd * (sin_r - self._sin_t)
        with np.errstate(invalid="ignore", divide="ignore"):
            sinc = np.where(x == 0, 1.0, np.sin(x) / x)
        g_r = _dipole_from_cos(dz / dist_r, self.antenna.dipole_coefficient)
        amp = self._tx_term * g_r * sinc**2 / dist_r**2
        excess = self._excess_t + self.geom.excess_lengths(r_rx, dist_r)
        w = amp * np.exp(-2j * self.k0 * excess)
        return (w, dist_r) if return_distances else w

    def power_from_weights(self, w, gammas) -> np.ndarray:
        return self.power_from_squares(w, np.asarray(gammas) ** 2)

    def power_from_squares(self, w, gamma_sq) -> np.ndarray:
        """As ``power_from_weights`` but taking gamma**2 directly (table lookups)."""
        return self.prefactor * np.abs(np.sum(w * gamma_sq, axis=(-2, -1)))

    def power(self, gammas, r_rx) -> np.ndarray:
        return self.power_from_weights(self.weights(r_rx), np.asarray(gammas))


def received_power(gammas, geom: ArrayGeometry, r_tx, r_rx, p_t: float,
                   cfg: AntennaConfig | None = None):
    """Power (W) captured by the UE dipole at ``r_rx`` for reflection matrix ``gammas``.

    The per-cell contributions are complex; the result is the magnitude of their
    sum times P_t lambda^2 / (4 pi)^2. Path phases are taken relative to the
    array centre, as in ``LinkBudget``.
    """
    lam = geom.wavelength
    cfg = cfg or AntennaConfig()
    cells = geom.cells
    ang = link_angles(cells, r_tx, r_rx)
    k0 = 2 * np.pi / lam
    d_t = _norm(np.asarray(r_tx, dtype=float) - cells)
    d_r = _norm(np.asarray(r_rx, dtype=float) - cells)
    if np.any(d_t == 0) or np.any(d_r == 0):
        raise GeometryError("zero TX/RX distance to a cell")
    gammas = np.asarray(gammas, dtype=complex)
    terms = (tx_gain(ang.theta_tx, cfg) * rx_gain_dipole(ang.theta_rx, cfg)
             * rcs_tm(ang.theta_t, ang.theta_r, geom.lattice_d, lam)
             * np.abs(gammas) ** 2
             * np.exp(2j * (np.angle(gammas)
                           - k0 * (geom.excess_lengths(r_tx, d_t) + geom.excess_lengths(r_rx, d_r))))
             / (d_t**2 * d_r**2))
    return p_t * lam**2 / (4 * np.pi) ** 2 * abs(np.sum(terms))
