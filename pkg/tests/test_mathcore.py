import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aerial_etc.mathcore import (
    NonFiniteError,
    SwitchParams,
    diag_gain,
    frac_power,
    gain_norm,
    rk4_integrate,
    rk4_step,
    sgn,
    theta,
    vec3,
)

SP = SwitchParams(0.75, 1e-4)
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False, allow_subnormal=False)
vecs = arrays(np.float64, 3, elements=finite)
exps = st.floats(0.51, 0.99)
epss = st.floats(1e-6, 1.0)


def theta_oracle(s, p, eps):
    # straight transcription of the piecewise definition
    n2 = float(np.dot(s, s))
    if n2 == 0.0:
        return np.zeros(3)
    base = s / n2 ** (1.0 - p)
    if n2 > eps:
        return base
    return math.sin(n2 * math.pi / (2 * eps)) ** 2 * base


class TestTheta:
    def test_origin(self):
        assert np.array_equal(theta(np.zeros(3), SP), np.zeros(3))

    def test_unit(self):
        np.testing.assert_allclose(theta(np.array([1.0, 0, 0]), SP), [1, 0, 0], rtol=0, atol=1e-15)

    def test_four(self):
        np.testing.assert_allclose(theta(np.array([4.0, 0, 0]), SP), [2, 0, 0], rtol=1e-14)

    def test_branch_boundary(self):
        s = np.array([math.sqrt(1e-4), 0, 0])
        inner = math.sin(math.pi / 2) ** 2 * s / (s @ s) ** 0.25
        np.testing.assert_allclose(theta(s, SP), inner, rtol=1e-14)

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFiniteError):
            theta(np.array([np.nan, 0, 0]), SP)

    @given(vecs, exps, epss)
    def test_matches_oracle(self, s, p, eps):
        np.testing.assert_allclose(theta(s, SwitchParams(p, eps)), theta_oracle(s, p, eps), rtol=1e-12, atol=1e-300)

    @given(vecs, exps, epss)
    def test_bound_and_alignment(self, s, p, eps):
        out = theta(s, SwitchParams(p, eps))
        assert np.linalg.norm(out) <= np.linalg.norm(s) + 1.0 + 1e-12
        assert float(s @ out) >= 0.0

    @given(arrays(np.float64, 3, elements=st.floats(-1, 1)).filter(lambda u: np.linalg.norm(u) > 1e-3),
           exps, epss)
    def test_continuous_across_switch(self, u, p, eps):
        u = u / np.linalg.norm(u)
        r = math.sqrt(eps)
        d = 1e-12 * r
        sp = SwitchParams(p, eps)
        jump = np.linalg.norm(theta((r - d) * u, sp) - theta((r + d) * u, sp))
        assert jump < 1e-8

    def test_continuous_at_origin(self):
        s = np.array([1e-9, -2e-9, 0.5e-9])
        assert np.linalg.norm(theta(s, SP)) < 1e-12


class TestFracPower:
    def test_examples(self):
        assert np.array_equal(frac_power(np.zeros(3), 0.75), np.zeros(3))
        np.testing.assert_allclose(frac_power(np.array([1.0, 0, 0]), 0.75), [1, 0, 0])
        np.testing.assert_allclose(frac_power(np.array([0, 0, 4.0]), 0.75), [0, 0, 2], rtol=1e-14)

    @given(vecs.filter(lambda s: np.any(s != 0)), exps)
    def test_magnitude(self, s, p):
        out = frac_power(s, p)
        n = math.hypot(*s)
        assert abs(math.hypot(*out) - n ** (2 * p - 1)) <= 1e-12 * max(1.0, n ** (2 * p - 1))

    @given(vecs, exps)
    def test_direction(self, s, p):
        out = frac_power(s, p)
        assert float(s @ out) >= 0.0
        assert np.array_equal(np.sign(out), np.sign(s))


class TestSmallVectors:
    def test_vec3_shape(self):
        with pytest.raises(ValueError):
            vec3([1.0, 2.0])
        with pytest.raises(NonFiniteError):
            vec3([1.0, np.inf, 0])

    def test_diag_gain(self):
        np.testing.assert_array_equal(diag_gain([1, 2, 3]), [1.0, 2.0, 3.0])
        with pytest.raises(ValueError, match="strictly positive"):
            diag_gain([1, 0, 3], "k")
        assert gain_norm(np.array([0.8, 0.8, 1.2])) == 1.2

    def test_gain_norm_is_induced_2norm(self, rng):
        g = rng.uniform(0.1, 5, 3)
        assert gain_norm(g) == pytest.approx(np.linalg.norm(np.diag(g), 2), rel=1e-14)

    def test_switch_params(self):
        with pytest.raises(ValueError, match=r"exponent must satisfy 0.5 < p < 1"):
            SwitchParams(p_exp=1.2)
        with pytest.raises(ValueError):
            SwitchParams(p_exp=0.5)
        with pytest.raises(ValueError):
            SwitchParams(switch_eps=0.0)

    def test_sgn_zero(self):
        np.testing.assert_array_equal(sgn(np.array([0.0, -2.0, 3.0])), [0.0, -1.0, 1.0])

    @given(vecs, st.floats(1e-3, 1e3))
    def test_sgn_scale_invariant(self, s, c):
        np.testing.assert_array_equal(sgn(c * s), sgn(s))


class TestRK4:
    def test_zero_field(self):
        x = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(rk4_step(lambda t, x: np.zeros_like(x), x, 0.0, 0.1), x)

    def test_exponential_one_step(self):
        h = 0.1
        expected = 1 + h + h ** 2 / 2 + h ** 3 / 6 + h ** 4 / 24
        out = rk4_step(lambda t, x: x, np.array([1.0]), 0.0, h)
        assert out[0] == pytest.approx(expected, rel=1e-15)
        assert out[0] == pytest.approx(1.1051708333333, abs=1e-12)

    def test_constant_field_exact(self):
        c = np.array([0.3, -1.7])
        x0 = np.array([2.0, 5.0])
        np.testing.assert_allclose(rk4_step(lambda t, x: c, x0, 1.0, 0.25), x0 + 0.25 * c, rtol=0, atol=1e-15)

    def test_polynomial_in_time_exact(self):
        # RK4 integrates x' = t^3 exactly (Simpson's rule)
        out = rk4_integrate(lambda t, x: np.array([t ** 3]), np.array([0.0]), 0.0, 0.1, 10)
        assert out[0] == pytest.approx(0.25, rel=1e-13)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            rk4_step(lambda t, x: x, np.array([1.0]), 0.0, 0.0)

    def test_order(self):
        errs = []
        for n in (10, 20, 40):
            x = rk4_integrate(lambda t, x: x, np.array([1.0]), 0.0, 1.0 / n, n)
            errs.append(abs(x[0] - math.e))
        for a, b in zip(errs, errs[1:]):
            assert 16 * 0.8 <= a / b <= 16 * 1.2


class TestScalarInequalities:
    """Self-tests of the Young-type and power-sum inequalities used in the stability argument."""

    @given(st.floats(-1e2, 1e2), st.floats(-1e2, 1e2), st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0.05, 20))
    def test_young_type(self, q1, q2, n1, n2, n3):
        lhs = abs(q1) ** n1 * abs(q2) ** n2
        s = n1 + n2
        rhs = n1 / s * n3 * abs(q1) ** s + n2 / s * n3 ** (-n1 / n2) * abs(q2) ** s
        assert lhs <= rhs * (1 + 1e-9) + 1e-300

    @given(arrays(np.float64, st.integers(1, 8), elements=st.floats(-1e3, 1e3)), st.floats(0.01, 1.0))
    def test_power_sums(self, v, q):
        assert np.sum(np.abs(v)) ** q <= np.sum(np.abs(v) ** q) * (1 + 1e-12) + 1e-300
        w = np.abs(v)
        assert np.sum(w) ** 2 <= v.size * np.sum(w ** 2) * (1 + 1e-12) + 1e-300


def test_theta_many_matches_rowwise(rng):
    from aerial_etc.mathcore import theta_many
    S = rng.normal(scale=0.02, size=(500, 3))
    out = theta_many(S, SP)
    for s, o in zip(S, out):
        np.testing.assert_array_equal(o, theta(s, SP))
    with pytest.raises(ValueError):
        theta_many(np.zeros((3, 2)), SP)
