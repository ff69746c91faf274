import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aerial_etc.trajectory import TrajectorySpec, ramp_profile, traj_sample

SPECS = [
    TrajectorySpec(kind="ellipse"),
    TrajectorySpec(kind="ellipse", altitude_amp=0.2, omega=0.7),
    TrajectorySpec(kind="figure_eight"),
    TrajectorySpec(kind="figure_eight", altitude_amp=0.1, ramp=2.0),
]


def test_setpoint_is_constant():
    spec = TrajectorySpec(kind="setpoint", center=[1, 2, 3])
    for t in (0.0, 1.0, 100.0):
        s = traj_sample(spec, t)
        np.testing.assert_array_equal(s.p_d, [1, 2, 3])
        for d in (s.pd_dot, s.pd_ddot, s.pd_dddot):
            np.testing.assert_array_equal(d, np.zeros(3))


def test_ellipse_after_ramp():
    spec = TrajectorySpec(kind="ellipse", a=1.0, b=0.6, omega=0.5, ramp=4.0)
    t = 4 * np.pi  # omega t = 2 pi, past the ramp
    s = traj_sample(spec, t)
    np.testing.assert_allclose(s.p_d, spec.center + [1.0, 0, 0], atol=1e-14)
    np.testing.assert_allclose(s.pd_dot, [0, 0.6 * 0.5, 0], atol=1e-14)


def test_figure_eight_after_ramp():
    spec = TrajectorySpec(kind="figure_eight", a=1.0, b=0.6, omega=0.5)
    t = 20.0
    s = traj_sample(spec, t)
    np.testing.assert_allclose(s.p_d, spec.center + [np.sin(0.5 * t), 0.6 * np.sin(t), 0], rtol=1e-14)


@pytest.mark.parametrize("spec", SPECS)
def test_derivatives_match_finite_differences(spec, rng):
    h = 1e-5
    for t in rng.uniform(h, 30, 100):
        s = traj_sample(spec, t)
        lo, hi = traj_sample(spec, t - h), traj_sample(spec, t + h)
        np.testing.assert_allclose((hi.p_d - lo.p_d) / (2 * h), s.pd_dot, atol=1e-6)
        np.testing.assert_allclose((hi.pd_dot - lo.pd_dot) / (2 * h), s.pd_ddot, atol=1e-6)
        np.testing.assert_allclose((hi.pd_ddot - lo.pd_ddot) / (2 * h), s.pd_dddot, atol=1e-6)


@pytest.mark.parametrize("spec", SPECS)
def test_smooth_start(spec):
    s = traj_sample(spec, 0.0)
    np.testing.assert_allclose(s.p_d, spec.center, atol=1e-15)
    for d in (s.pd_dot, s.pd_ddot, s.pd_dddot):
        np.testing.assert_allclose(d, np.zeros(3), atol=1e-15)


@pytest.mark.parametrize("spec", SPECS)
def test_bounded_derivatives(spec):
    for t in np.linspace(0, 60, 2001):
        s = traj_sample(spec, t)
        for d in s:
            assert np.all(np.isfinite(d)) and np.linalg.norm(d) < 10


def test_ramp_is_c3_at_both_ends():
    T = 4.0
    r0 = ramp_profile(0.0, T)
    r1 = ramp_profile(T, T)
    np.testing.assert_allclose(r0, [0, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(r1, [1, 0, 0, 0], atol=1e-12)
    after = ramp_profile(T + 1.0, T)
    np.testing.assert_array_equal(after, [1, 0, 0, 0])


@given(st.floats(0, 4.0))
def test_ramp_monotone_in_unit_interval(t):
    r = ramp_profile(t, 4.0)
    assert 0.0 <= r[0] <= 1.0
    assert r[1] >= -1e-15


def test_validation():
    with pytest.raises(ValueError):
        TrajectorySpec(kind="circle")
    with pytest.raises(ValueError):
        TrajectorySpec(omega=0.0)
    with pytest.raises(ValueError):
        TrajectorySpec(ramp=0.0)
    with pytest.raises(ValueError):
        traj_sample(TrajectorySpec(), -1.0)
    TrajectorySpec(kind="setpoint", omega=0.0)
