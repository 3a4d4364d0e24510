import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from risbeam.backscatter import (
    AntennaConfig,
    ArrayGeometry,
    GeometryError,
    LinkBudget,
    cos_power_integral,
    link_angles,
    rcs_tm,
    received_power,
    rx_gain_dipole,
    tx_gain,
    watts_to_dbm,
)
from risbeam.beam_control import optimal_phase_matrix

TX = np.array([100.0, -100.0, 0.0])


def test_specular_angles():
    a = link_angles(np.zeros(3), [1.0, -1.0, 0.0], [1.0, 1.0, 0.0])
    assert a.theta_t == pytest.approx(np.pi / 4)
    assert a.theta_r == pytest.approx(np.pi / 4)
    back = link_angles(np.zeros(3), [1.0, -1.0, 0.0], [1.0, -1.0, 0.0])
    assert back.theta_r == pytest.approx(-np.pi / 4)


def test_rx_straight_above_has_zero_theta_rx():
    a = link_angles(np.zeros(3), [1.0, 0.0, 0.0], [1e-9 + 1.0, 0.0, 1e6])
    assert a.theta_rx == pytest.approx(0.0, abs=1e-5)


def test_link_angles_reject_back_side():
    with pytest.raises(GeometryError):
        link_angles(np.zeros(3), [-1.0, 0, 0], [1.0, 0, 0])


def test_rcs_peak_and_first_null():
    lam = 0.1
    assert rcs_tm(0.0, 0.0, lam / 2, lam) == pytest.approx(np.pi * lam**2 / 4, rel=1e-14)
    # with D = lambda the sinc argument reaches pi at grazing departure
    assert rcs_tm(0.0, np.pi / 2, lam, lam) == pytest.approx(0.0, abs=1e-30)


def test_tx_gain_values():
    flat = AntennaConfig(0.0)
    assert float(tx_gain(0.3, flat)) == pytest.approx(2 / np.pi, rel=1e-12)
    assert float(tx_gain(np.pi / 2, AntennaConfig())) == pytest.approx(0.0, abs=1e-300)
    assert float(tx_gain(2.0, AntennaConfig())) == 0.0
    g0 = float(tx_gain(0.0, AntennaConfig()))
    assert g0 == pytest.approx(1 / oracles.wallis_cos_integral(100), rel=1e-10)
    assert g0 == pytest.approx(7.9988, abs=1e-4)


@pytest.mark.parametrize("q", [0, 1, 2, 7, 40, 100])
def test_cos_power_integral_against_closed_form(q):
    assert cos_power_integral(float(q)) == pytest.approx(oracles.wallis_cos_integral(q), rel=1e-11)


def test_cos_power_integral_non_integer():
    assert cos_power_integral(2.5) == pytest.approx(oracles.cos_power_integral(2.5), rel=1e-9)


def test_dipole_pattern():
    assert float(rx_gain_dipole(np.pi / 2)) == pytest.approx(0.71199, rel=1e-15)
    assert float(rx_gain_dipole(0.0)) == 0.0
    assert float(rx_gain_dipole(np.pi)) == 0.0
    for th in (0.2, 0.9, 1.4):
        assert float(rx_gain_dipole(th)) == pytest.approx(float(rx_gain_dipole(np.pi - th)), rel=1e-12)


def test_watts_to_dbm():
    assert watts_to_dbm(1e-3) == 0.0
    assert watts_to_dbm(1.0) == pytest.approx(30.0, abs=1e-12)
    assert watts_to_dbm(50.0) == pytest.approx(46.9897, abs=1e-4)
    assert watts_to_dbm(0.0) == -np.inf
    assert np.array_equal(watts_to_dbm([1e-3, 0.0]), [0.0, -np.inf])


def _random_case(rng, rows, cols):
    g = 0.99 * rng.uniform(0.3, 1.0, (rows, cols)) * np.exp(1j * rng.uniform(-np.pi, np.pi, (rows, cols)))
    rx = np.array([rng.uniform(1, 80), rng.uniform(-60, 60), rng.uniform(-40, 40)])
    return g, rx


@pytest.mark.parametrize("seed", range(6))
def test_received_power_matches_term_by_term_oracle(seed):
    rng = np.random.default_rng(seed)
    rows, cols = 5, 7
    geom = ArrayGeometry(rows, cols)
    g, rx = _random_case(rng, rows, cols)
    ref = oracles.received_power(g.tolist(), rows, cols, geom.freq, TX.tolist(), rx.tolist(), 50.0)
    assert float(received_power(g, geom, TX, rx, 50.0)) == pytest.approx(ref, rel=1e-12)
    assert float(LinkBudget(geom, TX, 50.0).power(g, rx)) == pytest.approx(ref, rel=1e-12)


def test_batched_weights_match_single():
    geom = ArrayGeometry(6, 6)
    lb = LinkBudget(geom, TX, 50.0)
    pts = np.array([[10.0, 50, -30], [30, -10, 5], [5, 0, 0]])
    w = lb.weights(pts)
    for i, p in enumerate(pts):
        np.testing.assert_allclose(w[i], lb.weights(p), rtol=1e-15)


def _cophased(geom, rx):
    phi = optimal_phase_matrix(TX, rx, geom.cells, geom.k0)
    return 0.9 * np.exp(1j * phi)


def test_cophasing_is_coherent_sum():
    geom = ArrayGeometry(8, 8)
    rx = np.array([12.0, 40.0, -20.0])
    lb = LinkBudget(geom, TX, 50.0)
    w = lb.weights(rx)
    p = float(lb.power(_cophased(geom, rx), rx))
    assert p == pytest.approx(lb.prefactor * 0.81 * np.sum(np.abs(w)), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-np.pi, np.pi), st.integers(0, 63))
def test_perturbing_a_cophased_cell_never_helps(delta, cell):
    geom = ArrayGeometry(8, 8)
    rx = np.array([12.0, 40.0, -20.0])
    g = _cophased(geom, rx)
    base = float(received_power(g, geom, TX, rx, 50.0))
    g.flat[cell] *= np.exp(1j * delta)
    assert float(received_power(g, geom, TX, rx, 50.0)) <= base * (1 + 1e-12)


def test_common_phase_rotation_leaves_power_unchanged():
    geom = ArrayGeometry(5, 5)
    g, rx = _random_case(np.random.default_rng(9), 5, 5)
    a = float(received_power(g, geom, TX, rx, 50.0))
    b = float(received_power(g * np.exp(0.7j), geom, TX, rx, 50.0))
    assert b == pytest.approx(a, rel=1e-12)


def test_halving_single_cell_quarters_power():
    geom = ArrayGeometry(1, 1)
    rx = [20.0, 10.0, -5.0]
    a = float(received_power(np.array([[0.8 + 0j]]), geom, TX, rx, 50.0))
    b = float(received_power(np.array([[0.4 + 0j]]), geom, TX, rx, 50.0))
    assert b == pytest.approx(a / 4, rel=1e-14)


def test_received_below_transmitted():
    geom = ArrayGeometry()
    rx = np.array([10.0, 50.0, -30.0])
    assert 0 < float(received_power(_cophased(geom, rx), geom, TX, rx, 50.0)) < 50.0


def test_back_side_rx_rejected():
    lb = LinkBudget(ArrayGeometry(2, 2), TX, 1.0)
    with pytest.raises(GeometryError):
        lb.weights([-1.0, 0, 0])
    with pytest.raises(GeometryError):
        LinkBudget(ArrayGeometry(2, 2), [0.0, 1.0, 1.0], 1.0)


def test_nominal_ue1_start_power_level():
    geom = ArrayGeometry()
    rx = np.array([10.0, 50.0, -30.0])
    p = watts_to_dbm(float(received_power(_cophased(geom, rx), geom, TX, rx, 50.0)))
    assert -90 < p < -50
    assert math.isfinite(p)
