import numpy as np
import pytest
from scipy.linalg import expm

from uddsim.linalg import norm
from uddsim.pulses import periodic_times, udd_times, switching_function
from uddsim.verify import (
    ScalingFit,
    build_u_pm,
    interaction_picture_check,
    random_hermitian_pair,
    scaling_slope,
    u_pm_from_schedule,
    yangliu_deviation,
)

from conftest import random_hermitian, random_unitary

GRID = [0.2, 0.1, 0.05, 0.025, 0.0125]


def oracle_u_pm(c, z, n, total_time, sign):
    """scipy-expm segment product, written straight from the toggled form."""
    times = udd_times(n, total_time).times
    bounds = np.concatenate([[0.0], times, [total_time]])
    u = np.eye(c.shape[0], dtype=complex)
    for j in range(n + 1):
        h = c + sign * (-1) ** j * z
        u = expm(-1j * h * (bounds[j + 1] - bounds[j])) @ u
    return u


class TestBuildUPm:
    def test_zero_z_collapses(self, rng):
        c = random_hermitian(rng, 4)
        z = np.zeros((4, 4))
        for n in (0, 1, 4):
            u = build_u_pm(c, z, n, 0.7, +1)
            assert np.max(np.abs(u - expm(-1j * c * 0.7))) < 1e-12

    def test_commuting_n1_deviation_zero(self, rng):
        c = np.diag(rng.normal(size=4)).astype(complex)
        z = np.diag(rng.normal(size=4)).astype(complex)
        assert yangliu_deviation(c, z, 1, 0.5) < 1e-13

    def test_n0_single_segment(self, rng):
        c, z = random_hermitian(rng, 3), random_hermitian(rng, 3)
        for sign in (+1, -1):
            u = build_u_pm(c, z, 0, 0.4, sign)
            assert np.max(np.abs(u - expm(-1j * (c + sign * z) * 0.4))) < 1e-12

    def test_matches_scipy_oracle(self, rng):
        c, z = random_hermitian_pair(4, 3)
        for sign in (+1, -1):
            u = build_u_pm(c, z, 3, 0.3, sign)
            assert np.max(np.abs(u - oracle_u_pm(c, z, 3, 0.3, sign))) < 1e-12

    def test_input_validation(self, rng):
        c = random_hermitian(rng, 3)
        with pytest.raises(ValueError):
            build_u_pm(c, random_hermitian(rng, 4), 1, 0.5)
        with pytest.raises(ValueError):
            build_u_pm(c, np.triu(np.ones((3, 3))), 1, 0.5)
        with pytest.raises(ValueError):
            build_u_pm(c, np.zeros((3, 3)), 1, 0.5, sign=2)


class TestYangLiuDeviation:
    def test_zero_z(self, rng):
        c = random_hermitian(rng, 4)
        assert yangliu_deviation(c, np.zeros((4, 4)), 2, 0.5) < 1e-13

    def test_commuting_pair_any_n(self, rng):
        c = np.diag(rng.normal(size=4)).astype(complex)
        z = np.diag(rng.normal(size=4)).astype(complex)
        for n in (1, 2, 5, 8):
            assert yangliu_deviation(c, z, n, 0.7) < 1e-12

    @pytest.mark.parametrize("n", range(1, 9))
    def test_switching_integral_vanishes(self, n):
        # exact segment quadrature of F_N over the sin^2 schedule
        sched = udd_times(n, 1.0)
        bounds = sched.boundaries
        mids = 0.5 * (bounds[:-1] + bounds[1:])
        signs = switching_function(sched, mids)
        integral = float(np.sum(signs * np.diff(bounds)))
        assert abs(integral) < 1e-12

    def test_cubic_ratio_stabilizes_for_n2(self):
        c, z = random_hermitian_pair(4, 0)
        ts = [0.2, 0.1, 0.05, 0.025]
        ratios = [yangliu_deviation(c, z, 2, t) / t**3 for t in ts]
        for a, b in zip(ratios, ratios[1:]):
            assert abs(b / a - 1.0) < 0.25

    def test_unitary_conjugation_invariance(self, rng):
        c, z = random_hermitian_pair(4, 5)
        w = random_unitary(rng, 4)
        d1 = yangliu_deviation(c, z, 2, 0.15)
        d2 = yangliu_deviation(w @ c @ w.conj().T, w @ z @ w.conj().T, 2, 0.15)
        assert d1 == pytest.approx(d2, abs=1e-11)


class TestScalingSlope:
    def test_synthetic_square_law(self):
        fit = scaling_slope(lambda t: t**2, GRID)
        assert fit.slope == pytest.approx(2.0, abs=1e-6)
        assert isinstance(fit, ScalingFit) and fit.points_used == 5

    def test_noise_floor_rejected(self):
        with pytest.raises(ValueError):
            scaling_slope(lambda t: 1e-15, GRID)

    def test_saturation_excluded(self):
        # one saturated point is dropped, the rest still fit
        fit = scaling_slope(lambda t: 50.0 if t > 0.15 else t**2, GRID)
        assert fit.points_used == 4
        assert fit.slope == pytest.approx(2.0, abs=1e-6)

    def test_too_few_grid_points(self):
        with pytest.raises(ValueError):
            scaling_slope(lambda t: t, [0.1, 0.2, 0.3])

    def test_n1_random_pair_slope_window(self):
        c, z = random_hermitian_pair(4, 1)
        fit = scaling_slope(lambda t: yangliu_deviation(c, z, 1, t),
                            [0.2, 0.1, 0.05, 0.025])
        assert 1.7 <= fit.slope <= 2.5

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_udd_exponent_floor_three_seeds(self, n):
        for seed in range(3):
            c, z = random_hermitian_pair(4, seed)
            fit = scaling_slope(lambda t: yangliu_deviation(c, z, n, t), GRID)
            assert fit.slope >= n + 0.7

    def test_periodic_weaker_than_udd_at_n3(self):
        def deviation(sched_fn, c, z, t):
            up = u_pm_from_schedule(c, z, sched_fn(3, t), +1)
            um = u_pm_from_schedule(c, z, sched_fn(3, t), -1)
            return norm(um.conj().T @ up - np.eye(4), "spectral")

        for seed in range(3):
            c, z = random_hermitian_pair(4, seed)
            s_udd = scaling_slope(lambda t: deviation(udd_times, c, z, t), GRID).slope
            s_per = scaling_slope(lambda t: deviation(periodic_times, c, z, t), GRID).slope
            assert s_per < s_udd


class TestInteractionPicture:
    def test_zero_z(self, rng):
        c = random_hermitian(rng, 2)
        assert interaction_picture_check(c, np.zeros((2, 2)), 2, 0.5, 1000) < 1e-10

    def test_zero_c(self):
        c = np.zeros((2, 2))
        z, _ = random_hermitian_pair(2, 4)
        assert interaction_picture_check(c, z, 2, 0.5, 1000) < 1e-10

    def test_first_order_shrink(self):
        c, z = random_hermitian_pair(2, 0)
        d_coarse = interaction_picture_check(c, z, 2, 0.5, 1000)
        d_fine = interaction_picture_check(c, z, 2, 0.5, 10000)
        assert 5.0 < d_coarse / d_fine < 20.0

    def test_requires_enough_steps(self):
        c, z = random_hermitian_pair(2, 0)
        with pytest.raises(ValueError):
            interaction_picture_check(c, z, 1, 0.5, 100)


class TestRandomHermitianPair:
    def test_unit_spectral_norm_and_reproducible(self):
        c1, z1 = random_hermitian_pair(4, 7)
        c2, z2 = random_hermitian_pair(4, 7)
        assert np.array_equal(c1, c2) and np.array_equal(z1, z2)
        assert norm(c1, "spectral") == pytest.approx(1.0, abs=1e-12)
        assert norm(z1, "spectral") == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(c1 - c1.conj().T)) == 0.0
