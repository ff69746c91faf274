import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aerial_etc.mathcore import rk4_integrate
from aerial_etc.plant import (
    DivergenceError,
    PlantParams,
    PlantState,
    disturbance,
    friction_true,
    plant_deriv,
    u_from_uc,
    uc_from_u,
)

vel = arrays(np.float64, 3, elements=st.floats(-20, 20))
ZERO = np.zeros(3)


def quiet(**kw):
    base = dict(visc=ZERO, coul=ZERO, dist_amp=ZERO)
    base.update(kw)
    return PlantParams(**base)


class TestFriction:
    def test_zero_velocity(self):
        np.testing.assert_array_equal(friction_true(ZERO, PlantParams()), ZERO)

    def test_viscous_only(self):
        p = PlantParams(visc=[2, 2, 2], coul=ZERO)
        np.testing.assert_allclose(friction_true(np.array([1.0, 0, 0]), p), [-2 / 4.85, 0, 0], rtol=1e-14)
        assert -2 / 4.85 == pytest.approx(-0.41237, abs=1e-5)

    def test_formula(self, rng):
        p = PlantParams()
        v = rng.normal(size=3)
        expected = -(p.visc * v + p.coul * np.tanh(v / p.v_s)) / p.m_t
        np.testing.assert_allclose(friction_true(v, p), expected, rtol=1e-14)

    @given(vel)
    def test_odd(self, v):
        p = PlantParams()
        np.testing.assert_allclose(friction_true(-v, p), -friction_true(v, p), rtol=0, atol=1e-15)

    @given(vel, vel)
    def test_lipschitz(self, v1, v2):
        p = PlantParams()
        lhs = np.linalg.norm(friction_true(v1, p) - friction_true(v2, p))
        assert lhs <= p.friction_lipschitz * np.linalg.norm(v1 - v2) * (1 + 1e-12) + 1e-15

    @given(vel)
    def test_dissipative(self, v):
        assert float(v @ friction_true(v, PlantParams())) <= 0.0


class TestDisturbance:
    def test_zero_amplitude(self):
        p = PlantParams(dist_amp=ZERO)
        for t in (0.0, 1.3, 77.0):
            np.testing.assert_array_equal(disturbance(t, p), ZERO)

    def test_peak(self):
        p = PlantParams(dist_freq=[1.0, 1.0, 1.0], dist_phase=[0.0, 0.0, 0.0])
        np.testing.assert_allclose(disturbance(math.pi / 2, p), p.dist_amp, rtol=1e-15)

    def test_dense_bound(self):
        p = PlantParams()
        t = np.arange(0, 100, 1e-3)
        d = p.dist_amp * np.sin(np.outer(t, p.dist_freq) + p.dist_phase)
        assert np.linalg.norm(d, axis=1).max() <= p.delta_bar
        for ti in t[::997]:
            np.testing.assert_allclose(disturbance(ti, p), p.dist_amp * np.sin(p.dist_freq * ti + p.dist_phase),
                                       rtol=1e-14, atol=1e-16)

    def test_amplitude_exceeds_bound_rejected(self):
        with pytest.raises(ValueError, match="exceeds delta_bar"):
            PlantParams(dist_amp=[0.4, 0.4, 0.4], delta_bar=0.5)


class TestPlantDeriv:
    def test_free_drift(self):
        pd, vd = plant_deriv(PlantState(ZERO, [1, 2, 3]), ZERO, 0.3, quiet())
        np.testing.assert_array_equal(pd, [1, 2, 3])
        np.testing.assert_array_equal(vd, ZERO)

    def test_equilibrium(self):
        pd, vd = plant_deriv(PlantState([5, -1, 2], ZERO), ZERO, 0.0, PlantParams(dist_amp=ZERO))
        np.testing.assert_array_equal(pd, ZERO)
        np.testing.assert_array_equal(vd, ZERO)

    def test_sum_of_forcings(self, rng):
        p = PlantParams()
        v = rng.normal(size=3)
        u = rng.normal(size=3)
        _, vd = plant_deriv(PlantState(ZERO, v), u, 2.5, p)
        np.testing.assert_allclose(vd, u + disturbance(2.5, p) + friction_true(v, p), rtol=1e-14)

    def test_divergence_detector(self):
        with pytest.raises(DivergenceError):
            plant_deriv(PlantState(ZERO, [60.0, 0, 0]), ZERO, 0.0, PlantParams())

    def test_speed_nonincreasing_without_forcing(self):
        p = PlantParams(dist_amp=ZERO)

        def f(t, x):
            return np.concatenate(plant_deriv(PlantState(x[:3], x[3:]), ZERO, t, p))

        x = np.array([0, 0, 0, 2.0, -1.0, 0.5])
        speeds = [np.linalg.norm(x[3:])]
        for k in range(300):
            x = rk4_integrate(f, x, k * 0.01, 0.01, 1)
            speeds.append(np.linalg.norm(x[3:]))
        assert np.all(np.diff(speeds) <= 1e-12)


class TestThrustConversion:
    def test_hover(self):
        p = PlantParams()
        np.testing.assert_allclose(u_from_uc([0, 0, p.m_t * p.g], p), ZERO, atol=1e-14)

    def test_known_value(self):
        np.testing.assert_allclose(uc_from_u([0, 0, 1.0], PlantParams()), [0, 0, 52.38], rtol=1e-14)

    @given(arrays(np.float64, 3, elements=st.floats(-1e3, 1e3)))
    def test_round_trip(self, U):
        p = PlantParams()
        np.testing.assert_allclose(uc_from_u(u_from_uc(U, p), p), U, rtol=1e-12, atol=1e-10)
