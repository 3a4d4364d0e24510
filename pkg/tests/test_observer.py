import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from risbeam.observer import (
    Mode,
    ObserverState,
    TimingParams,
    observer_update,
    predict_position,
    time_advance,
)

TM = 0.1
vec = st.lists(st.floats(-50, 50), min_size=3, max_size=3).map(np.array)


def feed(samples, mode):
    s = ObserverState.initial()
    states = []
    for y in samples:
        s = observer_update(s, y, mode, TM)
        states.append(s)
    return states


def test_first_measurement_zero_estimates():
    for mode in Mode:
        s = observer_update(ObserverState.initial(), [1, 2, 3], mode, TM)
        assert s.q == 0
        assert not s.v_hat.any() and not s.a_hat.any()
        np.testing.assert_array_equal(predict_position(s, 0.5, mode), [1, 2, 3])


def test_predict_before_measurement_rejected():
    with pytest.raises(ValueError):
        predict_position(ObserverState.initial(), 0.1, Mode.OPS)
    with pytest.raises(ValueError):
        time_advance(0, ObserverState.initial(), TimingParams())


@given(vec, vec)
def test_ops_exact_on_constant_velocity(p0, v0):
    ys = [p0 + v0 * q * TM for q in range(5)]
    for q, s in enumerate(feed(ys, Mode.OPS)[1:], start=1):
        np.testing.assert_allclose(s.v_hat, v0, rtol=1e-9, atol=1e-9)
        assert not s.a_hat.any()
        t = 0.037
        np.testing.assert_allclose(predict_position(s, t, Mode.OPS),
                                   p0 + v0 * (q * TM + t), rtol=1e-12, atol=1e-9)


@given(vec, vec, vec)
def test_opa_exact_on_quadratic(p0, v0, a0):
    def pos(t):
        return p0 + v0 * t + 0.5 * a0 * t**2

    ys = [pos(q * TM) for q in range(6)]
    for q, s in enumerate(feed(ys, Mode.OPA)[2:], start=2):
        t = q * TM
        np.testing.assert_allclose(s.v_hat, v0 + a0 * t, rtol=1e-9, atol=1e-8)
        np.testing.assert_allclose(s.a_hat, a0, rtol=1e-9, atol=1e-6)
        for ta in (0.0, 0.02, 0.119):
            np.testing.assert_allclose(predict_position(s, ta, Mode.OPA), pos(t + ta),
                                       rtol=0, atol=1e-9)


@given(vec, vec)
def test_modes_agree_during_warm_up(y0, y1):
    a = feed([y0, y1], Mode.OPS)
    b = feed([y0, y1], Mode.OPA)
    for sa, sb in zip(a, b):
        assert np.array_equal(sa.v_hat, sb.v_hat) and np.array_equal(sa.a_hat, sb.a_hat)
        assert np.array_equal(predict_position(sa, 0.05, Mode.OPS),
                              predict_position(sb, 0.05, Mode.OPA))


def test_ops_predictor_example():
    s = ObserverState(np.zeros(3), np.zeros(3), np.zeros(3), np.array([10.0, 20, 30]),
                      np.zeros(3), 1)
    np.testing.assert_allclose(predict_position(s, 0.1, Mode.OPS), [1, 2, 3], rtol=1e-15)


def test_time_advance():
    tp = TimingParams(1e-3, 0.1, 0.02, 0.02)
    s = ObserverState(q=3)
    assert time_advance(300, s, tp) == 0.02
    assert time_advance(350, s, tp) == pytest.approx(0.07, abs=1e-15)
    steps = np.diff([time_advance(k, s, tp) for k in range(300, 400)])
    np.testing.assert_allclose(steps, 1e-3, rtol=1e-9)
    with pytest.raises(ValueError):
        time_advance(299, s, tp)


def test_measurement_index_non_integral_ratio():
    tp = TimingParams(1e-3, 0.0255)
    assert tp.measurement_fast_index(2) == 51
    assert TimingParams(1e-3, 0.1).measurement_fast_index(7) == 700


def test_batched_update_matches_loop():
    rng = np.random.default_rng(5)
    ys = rng.normal(size=(4, 7, 3))
    batch = ObserverState.initial((7,))
    single = [ObserverState.initial() for _ in range(7)]
    for q in range(4):
        batch = observer_update(batch, ys[q], Mode.OPA, TM)
        single = [observer_update(s, ys[q, i], Mode.OPA, TM) for i, s in enumerate(single)]
    for i, s in enumerate(single):
        assert np.array_equal(batch.a_hat[i], s.a_hat)
        assert np.array_equal(batch.v_hat[i], s.v_hat)


def test_noise_gain_of_estimators():
    sigma, n = 0.1, 200_000
    rng = np.random.default_rng(11)
    noise = sigma * rng.normal(size=(3, n))
    s_ops = ObserverState.initial((n,))
    s_opa = ObserverState.initial((n,))
    for q in range(3):
        y = np.zeros((n, 3))
        y[:, 0] = noise[q]
        s_ops = observer_update(s_ops, y, Mode.OPS, TM)
        s_opa = observer_update(s_opa, y, Mode.OPA, TM)
    var_v = s_ops.v_hat[:, 0].var()
    var_a = s_opa.a_hat[:, 0].var()
    assert var_v == pytest.approx(2 * sigma**2 / TM**2, rel=0.02)
    assert var_a == pytest.approx(6 * sigma**2 / TM**4, rel=0.02)
    assert var_a > var_v / TM**2
