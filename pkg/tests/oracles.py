"""Independent scalar reference implementations used as test oracles.

Nothing here imports the package: every quantity is recomputed from first
principles with plain floats, loops and cmath. Path lengths and the full
propagation phase of the link budget are carried in 40-digit arithmetic,
since at tens of thousands of radians a double loses ~1e-11 rad per term.
"""

import cmath
import math

import mpmath

C0 = 299792458.0
MU0 = 1.25663706127e-6  # CODATA 2022
EPS0 = 8.8541878188e-12  # CODATA 2022


def eta0():
    return math.sqrt(MU0 / EPS0)


def gamma_cell(v, freq=3.5e9, cj0=31e-12, vj=3.0, grading=2.0, rs=0.32, ls=1.7e-9,
               gap=1e-3, thickness=1.57e-3, eps_r=4.4 - 0.088j, eps_eff=None):
    """Reflection coefficient of one cell at reverse bias ``v`` (series varactor, c_p = 0)."""
    lam = C0 / freq
    w = 2 * math.pi * freq
    k0 = 2 * math.pi / lam
    D = lam / 2
    if eps_eff is None:
        eps_eff = eps_r.real
    c = cj0 / (1 + v / vj) ** grading
    z_var = rs + 1j * w * ls + 1 / (1j * w * c)
    n = cmath.sqrt(eps_r)
    z_slab = 1j * (eta0() / n) * cmath.tan(k0 * n * thickness)
    c_grid = 2 * D * EPS0 * eps_eff / math.pi * math.log(1 / math.sin(math.pi * gap / (2 * D)))
    z_patch = 1 / (1j * w * c_grid)
    z = 1 / (1 / z_var + 1 / z_patch + 1 / z_slab)
    return (z - eta0()) / (z + eta0())


def wrap(phi):
    return (phi + math.pi) % (2 * math.pi) - math.pi


def nearest_entry(phases, want):
    """Exhaustive scan for the minimal circular distance; first (lowest) index wins ties."""
    best, best_d = 0, float("inf")
    for i, p in enumerate(phases):
        d = abs(wrap(p - want))
        if d < best_d:
            best, best_d = i, d
    return best


def _sub(a, b):
    return [a[0] - b[0], a[1] - b[1], a[2] - b[2]]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _norm(a):
    return math.sqrt(_dot(a, a))


def _angle(a, b):
    c = max(-1.0, min(1.0, _dot(a, b) / (_norm(a) * _norm(b))))
    return math.acos(c)


def cos_power_integral(q, n=200000):
    """Composite Simpson rule for the integral of cos^q over [0, pi/2]."""
    h = (math.pi / 2) / n
    s = 1.0 + math.cos(math.pi / 2) ** q
    for i in range(1, n):
        s += (4 if i % 2 else 2) * math.cos(i * h) ** q
    return s * h / 3


def wallis_cos_integral(q: int):
    """Closed form of the integral of cos^q over [0, pi/2] for integer q."""
    if q % 2 == 0:
        r = math.pi / 2
        for k in range(1, q // 2 + 1):
            r *= (2 * k - 1) / (2 * k)
        return r
    r = 1.0
    for k in range(1, (q - 1) // 2 + 1):
        r *= (2 * k) / (2 * k + 1)
    return r


def received_power(gammas, rows, cols, freq, r_tx, r_rx, p_t, q_exp=100.0,
                   dipole=0.71199, norm_integral=None):
    """Term-by-term complex sum of the backscatter link budget."""
    lam = C0 / freq
    k0 = 2 * math.pi / lam
    D = lam / 2
    if norm_integral is None:
        norm_integral = wallis_cos_integral(int(q_exp))
    total = 0j
    mp = mpmath.mp.clone()
    mp.dps = 40
    k0_mp = 2 * mp.pi * mp.mpf(freq) / mp.mpf(C0)
    two_pi = 2 * mp.pi
    for m in range(1, rows + 1):
        for n in range(1, cols + 1):
            cell = [0.0, (n - (cols + 1) / 2) * D, (m - (rows + 1) / 2) * D]
            dt = _sub(r_tx, cell)
            dr = _sub(r_rx, cell)
            lt, lr = _norm(dt), _norm(dr)
            theta_t = _angle(dt, [1.0, 0.0, 0.0])
            theta_r = _angle(dr, [1.0, 0.0, 0.0])
            # forward-scatter tangent is minus the tangential part of dt
            if dr[1] * -dt[1] + dr[2] * -dt[2] < 0:
                theta_r = -theta_r
            theta_tx = _angle(r_tx, dt)
            theta_rx = _angle(dr, [0.0, 0.0, 1.0])
            g_t = max(math.cos(theta_tx), 0.0) ** q_exp / norm_integral
            s = math.sin(theta_rx)
            g_r = 0.0 if s == 0 else dipole * math.cos(math.pi / 2 * math.cos(theta_rx)) ** 2 / s**2
            x = k0 * D / 2 * (math.sin(theta_r) - math.sin(theta_t))
            sinc = 1.0 if x == 0 else math.sin(x) / x
            sigma = 4 * math.pi * D**4 / lam**2 * math.cos(theta_t) ** 2 * sinc**2
            g = gammas[m - 1][n - 1]
            lt_mp = mp.sqrt(sum((mp.mpf(a) - mp.mpf(b)) ** 2 for a, b in zip(r_tx, cell)))
            lr_mp = mp.sqrt(sum((mp.mpf(a) - mp.mpf(b)) ** 2 for a, b in zip(r_rx, cell)))
            phase = float(mp.fmod(2 * (mp.mpf(cmath.phase(g)) - k0_mp * (lt_mp + lr_mp)), two_pi))
            total += (g_t * g_r * sigma * abs(g) ** 2
                      * cmath.exp(1j * phase) / (lt**2 * lr**2))
    return p_t * lam**2 / (4 * math.pi) ** 2 * abs(total)
