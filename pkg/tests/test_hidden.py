import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from lgwait import hidden as hv
from lgwait.errors import EfficiencyRangeError, GridCoverageError

N_BIG = 10**6


class TestSampling:
    def test_component_means_vanish(self):
        ens = hv.sample_ensemble(10**5, seed=1)
        means = ens.positions(1.0, 0.0).mean(axis=0)
        assert np.all(np.abs(means) < 3 / math.sqrt(10**5))

    def test_unit_norm(self):
        ens = hv.sample_ensemble(1000, seed=2)
        np.testing.assert_allclose(np.linalg.norm(ens.positions(1.0, 0.3), axis=1), 1.0, atol=1e-12)

    def test_axis_component_uniform(self):
        ens = hv.sample_ensemble(10**5, seed=3)
        counts, _ = np.histogram(ens.x0, bins=10, range=(-1, 1))
        expected = 10**4
        assert np.all(np.abs(counts - expected) < 5 * math.sqrt(expected))

    @pytest.mark.parametrize("cond,sign", [("q_plus", 1), ("q_minus", -1)])
    def test_hemisphere(self, cond, sign):
        ens = hv.sample_ensemble(10**5, seed=4, conditioning=cond)
        assert np.all(sign * ens.z(1.0, 0.0) > 0)

    def test_deterministic(self):
        a = hv.sample_ensemble(200_000, seed=9)
        b = hv.sample_ensemble(200_000, seed=9, workers=3)
        np.testing.assert_array_equal(a.phase, b.phase)
        np.testing.assert_array_equal(a.x0, b.x0)

    def test_prefix_stable(self):
        # the first n draws do not depend on the total size
        a = hv.sample_ensemble(1000, seed=9)
        b = hv.sample_ensemble(5000, seed=9)
        np.testing.assert_array_equal(a.phase, b.phase[:1000])

    def test_bad_conditioning(self):
        with pytest.raises(ValueError):
            hv.sample_ensemble(10, seed=0, conditioning="up")

    def test_indexing(self):
        ens = hv.sample_ensemble(10, seed=0)
        v = ens[3]
        np.testing.assert_allclose(v.position(1.0, 0.5), ens.positions(1.0, 0.5)[3])


class TestTrajectory:
    def test_equator_flip_at_pi(self):
        v = hv.ClassicalSpinVector(0.0, 1.0, 0.0)
        traj = hv.trajectory_q(v, 1.0, hv.make_grid(0.0, 4.0, 400))
        assert len(traj.velocity_events) == 1
        time, direction = traj.velocity_events[0]
        assert direction == -1
        assert abs(time - math.pi) <= 0.01 + 1e-12

    def test_pole_never_flips(self):
        v = hv.ClassicalSpinVector(1.0, 0.0, 0.7)
        traj = hv.trajectory_q(v, 1.0, hv.make_grid(0.0, 20.0, 1000))
        assert np.all(traj.q == 1)
        assert traj.velocity_events == []

    def test_events_consistent_with_q(self):
        v = hv.ClassicalSpinVector(0.6, 0.8, 1.1)
        traj = hv.trajectory_q(v, 2.0, hv.make_grid(0.0, 10.0, 1000))
        total = sum(2 * d for _, d in traj.velocity_events)
        assert total == traj.q[-1] - traj.q[0]
        assert set(np.unique(traj.q)) <= {-1, 1}

    def test_short_window_single_flip(self):
        ens = hv.sample_ensemble(500, seed=5, conditioning="q_plus")
        grid = hv.make_grid(0.0, 0.99 * math.pi, 300)
        for i in range(len(ens)):
            assert len(hv.trajectory_q(ens[i], 1.0, grid).velocity_events) <= 1

    def test_flip_direction_follows_y_sign(self):
        # at a crossing the velocity has the sign of the y component
        ens = hv.sample_ensemble(200, seed=8)
        grid = hv.make_grid(0.0, 7.0, 7000)
        for i in range(len(ens)):
            v = ens[i]
            for time, direction in hv.trajectory_q(v, 1.0, grid).velocity_events:
                assert direction == np.sign(v.position(1.0, time - 5e-4)[1])

    def test_grid_count_matches_analytic(self):
        ens = hv.sample_ensemble(20_000, seed=6)
        exact = ens.sign_changes(1.0, 0.0, 9.0)
        coarse = ens.sign_changes(2.0, 0.0, 4.5, grid_steps=2)  # cells span 4.5 rad: explicit grid
        fine = ens.sign_changes(1.0, 0.0, 9.0, grid_steps=1000)
        np.testing.assert_array_equal(exact, fine)
        assert np.all(coarse <= exact)

    def test_analytic_count_matches_trajectory(self):
        ens = hv.sample_ensemble(50, seed=7)
        grid = hv.make_grid(0.0, 9.0, 9000)
        counts = ens.sign_changes(1.0, 0.0, 9.0)
        for i in range(len(ens)):
            assert len(hv.trajectory_q(ens[i], 1.0, grid).velocity_events) == counts[i]


class TestCorrelation:
    def test_equal_times(self):
        est = hv.classical_correlation(1.0, 0.4, 0.4, 1000, seed=1)
        assert est.estimate == 1.0

    @pytest.mark.parametrize("theta", [math.pi / 3, math.pi / 2])
    def test_against_quadrature(self, theta):
        est = hv.classical_correlation(1.0, 0.0, theta, N_BIG, seed=2)
        assert abs(est.estimate - oracles.correlation(theta)) <= 3 * est.stderr

    @pytest.mark.parametrize("theta", np.linspace(0, math.pi, 9))
    def test_sawtooth_closed_form_matches_quadrature(self, theta):
        assert hv.sawtooth_correlation(1.0, 0.0, theta) == pytest.approx(oracles.correlation(theta), abs=1e-9)


class TestSameDiff:
    def test_equal_times(self):
        assert hv.same_diff_probabilities(1.0, 0.0, 0.0, 100, seed=1) == (1.0, 0.0)

    def test_quarter_turn(self):
        n = N_BIG
        sd = hv.same_diff_probabilities(1.0, 0.0, math.pi / 2, n, seed=3)
        assert abs(sd.p_diff - 0.5) <= 3 * math.sqrt(0.25 / n)
        assert sd.p_same + sd.p_diff == 1.0

    def test_identity_with_correlation(self):
        sd = hv.same_diff_probabilities(1.3, 0.2, 1.1, 50_000, seed=4)
        est = hv.classical_correlation(1.3, 0.2, 1.1, 50_000, seed=4)
        assert sd.p_same - sd.p_diff == pytest.approx(est.estimate, abs=1e-15)


class TestVelocityIdentity:
    def test_unconditioned_both_sides_vanish(self):
        v = hv.velocity_identity_terms(1.0, N_BIG, 1e-3, seed=1, conditioning="none")
        assert abs(v.lhs) <= 3 * v.lhs_stderr
        assert abs(v.rhs) <= 3 * v.rhs_stderr

    def test_conditioned_sides_match_quadrature(self):
        omega, dt, s = 1.0, 1e-3, math.pi / 4
        v = hv.velocity_identity_terms(omega, N_BIG, dt, seed=2)
        lhs_ref = oracles.q_plus_velocity(s, omega)
        rhs_ref = omega * oracles.q_plus_mean_sign_y(s)
        assert abs(v.lhs - lhs_ref) <= 3 * v.lhs_stderr + omega**2 * dt
        assert abs(v.rhs - rhs_ref) <= 3 * v.rhs_stderr
        # the two sides differ in the hemisphere ensemble (-2/pi vs -1/2 at this probe)
        assert abs(v.residual - abs(lhs_ref - rhs_ref)) <= 3 * (v.lhs_stderr + v.rhs_stderr) + omega**2 * dt

    def test_sides_coincide_at_one_radian(self):
        # in the hemisphere ensemble the two means agree only at omega*t = 1
        assert oracles.q_plus_velocity(1.0, 1.0) == pytest.approx(oracles.q_plus_mean_sign_y(1.0), abs=1e-6)

    def test_rhs_linear_in_omega(self):
        a = hv.velocity_identity_terms(1.0, 10_000, 1e-3, seed=3)
        b = hv.velocity_identity_terms(2.0, 10_000, 1e-3, seed=3)
        # same probe angle, same ensemble
        assert b.rhs == 2 * a.rhs

    def test_residual_helper(self):
        v = hv.velocity_identity_terms(1.0, 10_000, 1e-3, seed=3)
        assert hv.velocity_identity_residual(1.0, 10_000, 1e-3, seed=3) == v.residual


class TestPointer:
    def test_no_flip_is_pure_drift(self):
        traj = hv.trajectory_q(hv.ClassicalSpinVector(0.0, 1.0, 0.5), 1.0, hv.make_grid(0.0, 1.0, 100))
        assert hv.pointer_shift(traj, 0.1, 2.0, 4.0, 0.0, 1.0) == 2.0 * 1.0 / 4.0

    def test_single_down_flip(self):
        traj = hv.trajectory_q(hv.ClassicalSpinVector(0.0, 1.0, 0.0), 1.0, hv.make_grid(0.0, 4.0, 400))
        assert hv.pointer_shift(traj, 0.3, 0.0, 1.0, 0.0, 4.0) == pytest.approx(-0.6)

    def test_uncovered_interval(self):
        traj = hv.trajectory_q(hv.ClassicalSpinVector(0.0, 1.0, 0.0), 1.0, hv.make_grid(0.0, 1.0, 10))
        with pytest.raises(GridCoverageError):
            hv.pointer_shift(traj, 0.1, 0.0, 1.0, 0.0, 2.0)

    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.0, 2.0), st.floats(2.5, 6.0))
    def test_linear_in_lambda_and_momentum(self, lam, p, t1, t2):
        traj = hv.trajectory_q(hv.ClassicalSpinVector(0.6, 0.8, 2.0), 1.0, hv.make_grid(0.0, 6.0, 600))
        f = lambda lam_, p_: hv.pointer_shift(traj, lam_, p_, 1.5, t1, t2)
        assert f(2 * lam, p) - f(0, p) == pytest.approx(2 * (f(lam, p) - f(0, p)), abs=1e-12)
        assert f(lam, 2 * p) - f(lam, 0) == pytest.approx(2 * (f(lam, p) - f(lam, 0)), abs=1e-12)

    def test_matches_q_difference(self):
        ens = hv.sample_ensemble(40, seed=4)
        grid = hv.make_grid(0.0, 5.0, 500)
        for i in range(len(ens)):
            traj = hv.trajectory_q(ens[i], 1.0, grid)
            shift = hv.pointer_shift(traj, 1.0, 0.0, 1.0, 1.0, 4.0)
            assert shift == traj.q_at(4.0) - traj.q_at(1.0)

    def test_ensemble_mean_counts_identity(self):
        n, theta = 200_000, 1.2
        ens = hv.sample_ensemble(n, seed=5, conditioning="q_plus")
        shifts = hv.ensemble_pointer_shift(ens, 1.0, 0.05, 0.0, 1.0, 0.0, theta)
        sd = hv.same_diff_probabilities(1.0, 0.0, theta, n, seed=5, conditioning="q_plus")
        assert float(np.mean(shifts / 0.05)) == pytest.approx(2 * (sd.p_same - 1), abs=1e-12)


class TestClassicalLG:
    def test_per_member_combinations_nonnegative(self):
        for wt in np.linspace(0.1, math.pi, 6):
            est = hv.classical_lg_report(1.0, (0.0, wt, 2 * wt), 50_000, seed=1)
            assert min(est.report.lhs) >= 0.0

    def test_needs_three_times(self):
        with pytest.raises(ValueError):
            hv.classical_lg_report(1.0, (0.0, 1.0), 100, seed=1)


class TestDetector:
    def test_full_efficiency_counts_every_flip(self):
        r = hv.classical_detector_run(1.0, 0.5, 0.0, 1.0, 100_000, seed=1)
        assert r.p1_hat == r.pd_hat

    def test_quarter_turn_rate(self):
        r = hv.classical_detector_run(1.0, 0.1, 0.0, math.pi / 2, N_BIG, seed=2)
        assert abs(r.p1_hat - 0.02) <= 3 * r.p1_stderr
        assert r.p0_hat + r.p1_hat == 1.0

    def test_consistent_with_direct_correlator(self):
        r = hv.classical_detector_run(1.0, 0.1, 0.0, 1.0, N_BIG, seed=3)
        est = hv.classical_correlation(1.0, 0.0, 1.0, N_BIG, seed=3)
        assert abs(r.c12_hat - est.estimate) <= 3 * math.hypot(r.c12_stderr, est.stderr)

    def test_efficiency_out_of_range(self):
        with pytest.raises(EfficiencyRangeError):
            hv.classical_detector_run(1.0, 0.6, 0.0, 1.0, 100, seed=1)
