import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from textlogit.errors import ParameterError
from textlogit.penalty import (
    ScadParams,
    coordinate_update,
    rescaled_coordinate_update,
    scad_coordinate_update,
    scad_derivative,
    scad_penalty,
    soft_threshold,
)

from oracles import brute_force_prox, scad_value


class TestPenaltyValue:
    def test_zero_at_origin(self):
        assert scad_penalty(0.0, ScadParams(lam=1.0, gamma=3.0)) == 0.0

    def test_saturation_at_outer_knot(self):
        # gamma*lam with lam=1, gamma=3 -> (gamma+1)*lam^2/2 = 2
        assert scad_penalty(3.0, ScadParams(lam=1.0, gamma=3.0)) == pytest.approx(2.0)

    def test_middle_branch_value(self):
        # lam=1, gamma=3.7, beta=2: -(4 - 14.8 + 1) / (2 * 2.7)
        val = scad_penalty(2.0, ScadParams(lam=1.0, gamma=3.7))
        assert val == pytest.approx(9.8 / 5.4, abs=1e-10)
        assert val == pytest.approx(1.81481, abs=1e-5)

    def test_middle_branch_matches_integrated_derivative(self):
        params = ScadParams(lam=1.0, gamma=3.7)
        integral, _ = quad(lambda b: scad_derivative(b, params), 1e-12, 2.0)
        assert scad_penalty(2.0, params) == pytest.approx(integral, abs=1e-8)

    def test_continuity_at_knots(self):
        params = ScadParams(lam=0.8, gamma=2.9)
        for knot in (params.lam, params.gamma * params.lam):
            below = scad_penalty(knot - 1e-9, params)
            above = scad_penalty(knot + 1e-9, params)
            assert abs(below - above) < 1e-8

    @given(
        beta=st.floats(-20, 20),
        lam=st.floats(0.01, 3),
        gamma=st.floats(2.05, 8),
    )
    def test_even_symmetry(self, beta, lam, gamma):
        params = ScadParams(lam=lam, gamma=gamma)
        assert scad_penalty(beta, params) == scad_penalty(-beta, params)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            ScadParams(lam=-0.1)
        with pytest.raises(ParameterError):
            ScadParams(lam=1.0, gamma=2.0)


class TestDerivative:
    def test_flat_rate_region(self):
        params = ScadParams(lam=0.6, gamma=3.7)
        assert scad_derivative(0.3, params) == pytest.approx(0.6)

    def test_vanishes_beyond_outer_knot(self):
        params = ScadParams(lam=0.6, gamma=3.7)
        assert scad_derivative(10.0, params) == 0.0

    def test_middle_value(self):
        # lam=1, gamma=3.7, beta=2 -> (3.7-2)/2.7
        params = ScadParams(lam=1.0, gamma=3.7)
        assert scad_derivative(2.0, params) == pytest.approx(1.7 / 2.7, abs=1e-10)

    def test_domain_error(self):
        with pytest.raises(ParameterError):
            scad_derivative(0.0, ScadParams(lam=1.0))
        with pytest.raises(ParameterError):
            scad_derivative(-1.0, ScadParams(lam=1.0))

    def test_finite_differences(self, rng):
        # 500 points off the knots, tolerance 1e-5
        params = ScadParams(lam=0.7, gamma=3.3)
        hi = 3 * params.gamma * params.lam
        eps = 1e-7
        count = 0
        while count < 500:
            b = float(rng.uniform(eps * 10, hi))
            if min(abs(b - params.lam), abs(b - params.gamma * params.lam)) < 1e-4:
                continue
            fd = (scad_penalty(b + eps, params) - scad_penalty(b - eps, params)) / (2 * eps)
            assert abs(fd - scad_derivative(b, params)) < 1e-5
            count += 1


class TestSoftThreshold:
    def test_dead_zone(self):
        assert soft_threshold(0.5, 1.0) == 0.0

    def test_shrinks_toward_zero(self):
        assert soft_threshold(-3.0, 1.0) == -2.0

    def test_boundary(self):
        assert soft_threshold(1.0, 1.0) == 0.0

    @given(z=st.floats(-50, 50), lam=st.floats(0, 10))
    def test_magnitude_never_grows(self, z, lam):
        assert abs(soft_threshold(z, lam)) <= abs(z)


class TestCoordinateUpdate:
    def test_zero_input(self):
        assert scad_coordinate_update(0.0, 1.0, ScadParams(lam=0.5)) == 0.0

    def test_identity_region_is_unbiased(self):
        params = ScadParams(lam=0.5, gamma=3.7)
        z = 10.0 * 1.0 * params.gamma * params.lam
        assert scad_coordinate_update(z, 1.0, params) == pytest.approx(z)

    def test_matches_brute_force_example(self):
        params = ScadParams(lam=0.5, gamma=3.7)
        got = scad_coordinate_update(1.2, 1.0, params)
        want = brute_force_prox(1.2, 1.0, 0.5, 3.7)
        assert abs(got - want) < 1e-4

    def test_domain_error(self):
        with pytest.raises(ParameterError):
            scad_coordinate_update(1.0, 0.0, ScadParams(lam=0.5))

    def test_brute_force_oracle_convex_regime(self, rng):
        params_list = []
        while len(params_list) < 300:
            lam = float(rng.uniform(0.05, 2.0))
            gamma = float(rng.uniform(2.1, 8.0))
            v = float(rng.uniform(0.05, 4.0))
            if v <= 1.0 / (gamma - 1.0):
                continue
            z = float(rng.uniform(-6, 6))
            params_list.append((z, v, lam, gamma))
        for z, v, lam, gamma in params_list:
            got = scad_coordinate_update(z, v, ScadParams(lam=lam, gamma=gamma))
            want = brute_force_prox(z, v, lam, gamma)
            assert abs(got - want) < 1e-4, (z, v, lam, gamma)

    def test_brute_force_oracle_nonconvex_regime(self, rng):
        # middle band is concave here; the update must still be the argmin
        for _ in range(150):
            gamma = float(rng.uniform(2.1, 5.0))
            v = float(rng.uniform(0.01, 1.0)) / (gamma - 1.0)
            lam = float(rng.uniform(0.05, 1.5))
            z = float(rng.uniform(-4, 4))
            got = scad_coordinate_update(z, v, ScadParams(lam=lam, gamma=gamma))
            want = brute_force_prox(z, v, lam, gamma)

            def g(b):
                return 0.5 * v * b * b - z * b + scad_value(b, lam, gamma)

            assert g(got) <= g(want) + 1e-8, (z, v, lam, gamma)

    def test_rescaled_update_oracle(self, rng):
        # the rescaled rule minimizes the same quadratic with gamma/v
        for _ in range(300):
            lam = float(rng.uniform(0.05, 1.5))
            gamma = float(rng.uniform(2.1, 6.0))
            v = float(rng.uniform(0.005, 3.0))
            z = float(rng.uniform(-6, 6))
            gamma_eff = max(gamma / v, 2.001)
            got = rescaled_coordinate_update(z, v, ScadParams(lam=lam, gamma=gamma))
            want = brute_force_prox(z, v, lam, gamma_eff)
            assert abs(got - want) < 1e-4, (z, v, lam, gamma)

    @given(
        z=st.floats(-10, 10),
        v=st.floats(0.01, 5),
        lam=st.floats(0.01, 2),
        gamma=st.floats(2.05, 8),
        adaptive=st.booleans(),
    )
    @settings(max_examples=300)
    def test_sign_and_shrinkage(self, z, v, lam, gamma, adaptive):
        got = coordinate_update(z, v, ScadParams(lam=lam, gamma=gamma), adaptive)
        if z == 0:
            assert got == 0.0
        else:
            assert got == 0.0 or math.copysign(1, got) == math.copysign(1, z)
        assert abs(got) <= abs(z) / v + 1e-12

    def test_lam_zero_is_plain_newton_step(self):
        params = ScadParams(lam=0.0)
        assert scad_coordinate_update(3.0, 2.0, params) == pytest.approx(1.5)
        assert rescaled_coordinate_update(3.0, 2.0, params) == pytest.approx(1.5)

    @given(v=st.floats(0.005, 1.9), sign=st.sampled_from([-1.0, 1.0]))
    @settings(max_examples=200)
    def test_rescaled_thresholds_ignore_curvature(self, v, sign):
        # dead zone ends at lam and the unshrunk region starts at gamma*lam
        # no matter the curvature, as long as gamma/v clears the floor
        lam, gamma = 0.4, 3.7
        if gamma / v <= 2.001:
            return
        params = ScadParams(lam=lam, gamma=gamma)
        inside = rescaled_coordinate_update(sign * lam * 0.999, v, params)
        assert inside == 0.0
        outside = rescaled_coordinate_update(sign * lam * 1.001, v, params)
        assert outside != 0.0
        z = sign * gamma * lam * 1.001
        assert rescaled_coordinate_update(z, v, params) == pytest.approx(z / v)
