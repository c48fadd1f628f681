import dataclasses
import math

import numpy as np
import pytest

from microtherm import (DegenerateTrajectory, DimensionMismatch, EigenFailure,
                        Grid1D, IndefiniteForm, InitialData, SizeLimit,
                        State1D, Trajectory, assemble_backward,
                        assemble_operator, backward_functionals,
                        backward_identity_residual, dissipation_rate,
                        dissipation_series, energy, energy_balance_residuals,
                        energy_series, fit_decay, gram_norm,
                        localization_probe, reference_type2, reference_type3,
                        run_forward, spectral_report, to_moduli_1d)

from conftest import random_state, random_valid_material, sine_init


def single_state_trajectory(s: State1D) -> Trajectory:
    return Trajectory(times=np.array([0.0]), snapshots=(s,), dt=1.0,
                      scheme="midpoint")


class TestEnergyBreakdown:
    def test_total_is_half_squared_gram_norm(self, op3):
        rng = np.random.default_rng(0)
        for _ in range(10):
            s = random_state(16, rng)
            b = energy(op3, s)
            assert math.isclose(b.total, 0.5 * gram_norm(op3, s) ** 2,
                                rel_tol=1e-14)

    def test_terms_sum_to_total(self, op3, op2):
        rng = np.random.default_rng(1)
        for op in (op3, op2):
            for _ in range(20):
                b = energy(op, random_state(16, rng))
                assert abs(b.total - sum(b.terms)) <= 1e-14 * abs(b.total)
                assert b.total >= 0.0

    def test_single_node_temperature_oracle(self, op3, moduli3):
        n, h = 16, op3.grid.h
        theta = np.zeros(n)
        theta[4] = 1.0
        s = State1D(np.zeros(n), np.zeros(n), np.zeros(n), theta,
                    np.zeros(n), np.zeros(n))
        b = energy(op3, s)
        assert b.thermal == 0.5 * moduli3.c_cap * h
        assert b.total == pytest.approx(b.thermal, rel=1e-15)

    def test_elastic_sine_oracle(self, op3, moduli3):
        n, h = 16, op3.grid.h
        x = op3.grid.nodes
        s = State1D(np.sin(np.pi * x), np.zeros(n), np.zeros(n), np.zeros(n),
                    np.zeros(n), np.zeros(n))
        mu = (4.0 / h ** 2) * np.sin(np.pi * h / 2.0) ** 2
        b = energy(op3, s)
        assert b.elastic == pytest.approx(moduli3.m_uu * mu / 4.0, rel=1e-13)
        assert b.elastic == pytest.approx(moduli3.m_uu * np.pi ** 2 / 4.0,
                                          rel=(np.pi * h) ** 2 / 12 * 2)

    def test_dimension_mismatch(self, op3):
        with pytest.raises(DimensionMismatch):
            energy(op3, State1D.zeros(4))

    def test_series_matches_pointwise_energy(self, op3):
        traj = run_forward(op3, sine_init(op3.grid), 0.01, 20)
        series = energy_series(traj, op3)
        for val, snap in zip(series, traj.snapshots):
            assert val == energy(op3, snap).total


class TestDissipationRate:
    def test_matches_generator_quadratic_form(self, op3, op3_back):
        rng = np.random.default_rng(2)
        for op in (op3, op3_back):
            for _ in range(20):
                s = random_state(16, rng)
                u = s.to_vector()
                d = dissipation_rate(op, s)
                quad = -float(u @ (op.g_mat @ (op.a_mat @ u)))
                scale = d + float(u @ (op.g_mat @ u))
                assert abs(d - quad) <= 1e-10 * scale

    def test_nonnegative_forward_and_type2_exact_zero(self, op3, op2):
        rng = np.random.default_rng(3)
        for _ in range(50):
            s = random_state(16, rng)
            assert dissipation_rate(op3, s) >= 0.0
            assert dissipation_rate(op2, s) == 0.0

    def test_sine_temperature_oracle(self, op3, moduli3):
        n, h = 16, op3.grid.h
        x = op3.grid.nodes
        s = State1D(np.zeros(n), np.zeros(n), np.zeros(n), np.sin(np.pi * x),
                    np.zeros(n), np.zeros(n))
        mu = (4.0 / h ** 2) * np.sin(np.pi * h / 2.0) ** 2
        d = dissipation_rate(op3, s)
        assert d == pytest.approx(moduli3.h_cond * mu / 2.0, rel=1e-13)
        assert d == pytest.approx(moduli3.h_cond * np.pi ** 2 / 2.0,
                                  rel=(np.pi * h) ** 2 / 12 * 2)

    def test_series_sign_follows_orientation(self, op3_back):
        traj = run_forward(op3_back, sine_init(op3_back.grid), 5e-5, 10)
        series = dissipation_series(traj, op3_back)
        assert (series[1:] < 0.0).all()  # time-reversed: production


class TestEnergyBalance:
    def test_midpoint_sampling_is_exact(self, op3):
        traj = run_forward(op3, sine_init(op3.grid), 0.01, 100)
        resid = energy_balance_residuals(traj, op3)
        e0 = energy_series(traj, op3)[0]
        assert np.abs(resid).max() <= 1e-13 * e0

    def test_trapezoid_sampling_is_third_order(self, op3):
        init = sine_init(op3.grid)

        def constant(dt):
            n_steps = int(round(1.0 / dt))
            traj = run_forward(op3, init, dt, n_steps)
            resid = energy_balance_residuals(traj, op3, sampling="trapezoid")
            return np.abs(resid).max() / dt ** 3

        c1, c2 = constant(2e-3), constant(1e-3)
        assert 0.5 <= c2 / c1 <= 2.0

    def test_unknown_sampling_rejected(self, op3):
        traj = run_forward(op3, sine_init(op3.grid), 0.01, 2)
        with pytest.raises(ValueError):
            energy_balance_residuals(traj, op3, sampling="simpson")


class TestSpectralReport:
    def test_type3_abscissa_and_margin(self, op3):
        rep = spectral_report(op3)
        assert rep.spectral_abscissa < 0.0
        assert rep.spectral_abscissa <= rep.dissipativity_margin <= 0.0
        assert rep.eigenvalues.shape == (96,)

    def test_type2_spectrum_is_imaginary(self, op2):
        rep = spectral_report(op2)
        scale = np.abs(rep.eigenvalues).max()
        assert np.abs(rep.eigenvalues.real).max() <= 1e-10 * scale

    def test_deterministic_for_fixed_seed(self, op3):
        a = spectral_report(op3, seed=5)
        b = spectral_report(op3, seed=5)
        assert a.dissipativity_margin == b.dissipativity_margin
        assert np.array_equal(a.eigenvalues, b.eigenvalues)

    def test_decoupled_elastic_eigenvalues(self):
        import dataclasses
        mat = dataclasses.replace(reference_type2(), beta=0.0, gamma1=0.0,
                                  gamma2=0.0, varpi=0.0, hbar_c=0.0)
        grid = Grid1D(n_interior=16)
        op = assemble_operator(grid, to_moduli_1d(mat))
        rep = spectral_report(op)
        h = grid.h
        scale = np.abs(rep.eigenvalues).max()
        for k in range(1, 17):
            mu = (4.0 / h ** 2) * np.sin(k * np.pi * h / 2.0) ** 2
            target = 1j * np.sqrt(op.moduli.m_uu / op.moduli.rho * mu)
            for lam in (target, -target):
                assert np.abs(rep.eigenvalues - lam).min() <= 1e-10 * scale

    def test_size_limit(self, moduli3):
        op = assemble_operator(Grid1D(n_interior=501), moduli3)
        with pytest.raises(SizeLimit):
            spectral_report(op)

    def test_eigensolver_failure_is_wrapped(self, op3, monkeypatch):
        def boom(_):
            raise np.linalg.LinAlgError("did not converge")
        monkeypatch.setattr(np.linalg, "eigvals", boom)
        with pytest.raises(EigenFailure):
            spectral_report(op3)


class TestFitDecay:
    def test_type3_rate_negative_with_window(self, op3):
        traj = run_forward(op3, sine_init(op3.grid), 0.01, 1000, snapshot_every=10)
        fit = fit_decay(traj, op3)
        assert fit.rate < 0.0
        assert fit.window[0] <= fit.rate <= fit.window[1]
        assert fit.n_points >= 10
        assert fit.time_to_fraction(0.01) > 0.0

    def test_type2_rate_vanishes(self, op2):
        traj = run_forward(op2, sine_init(op2.grid), 0.01, 1000, snapshot_every=10)
        fit = fit_decay(traj, op2)
        assert abs(fit.rate) <= 1e-8
        with pytest.raises(ValueError):
            fit.time_to_fraction(0.01)

    def test_degenerate_and_short_trajectories(self, op3):
        zero = run_forward(op3, InitialData.zeros(16), 0.01, 20)
        with pytest.raises(DegenerateTrajectory):
            fit_decay(zero, op3)
        short = run_forward(op3, sine_init(op3.grid), 0.01, 5)
        with pytest.raises(ValueError):
            fit_decay(short, op3)

    def test_fraction_domain(self, op3):
        traj = run_forward(op3, sine_init(op3.grid), 0.01, 200, snapshot_every=10)
        fit = fit_decay(traj, op3)
        with pytest.raises(ValueError):
            fit.time_to_fraction(1.5)


class TestBackwardFunctionals:
    def test_zero_trajectory_all_vanish(self, op3_back):
        traj = run_forward(op3_back, InitialData.zeros(16), 5e-5, 20)
        f = backward_functionals(traj, op3_back)
        assert not f.e1.any() and not f.e2.any() and not f.e3.any()
        assert not f.cal_e.any()
        assert f.gronwall_k == 0.0

    def test_e1_is_bitwise_energy(self, op3_back):
        traj = run_forward(op3_back, sine_init(op3_back.grid), 5e-5, 50)
        f = backward_functionals(traj, op3_back)
        for val, snap in zip(f.e1, traj.snapshots):
            assert val == energy(op3_back, snap).total

    def test_e1_e2_recombination(self, op3_back):
        # E1 = E2 + (c theta^2 + alpha M^2 + K tau'^2 + m_rr R'^2
        #            + m_ur cross) quadrature, restated per state
        rng = np.random.default_rng(4)
        for _ in range(20):
            s = random_state(16, rng)
            f = backward_functionals(single_state_trajectory(s), op3_back)
            b = energy(op3_back, s)
            recombined = f.e2[0] + 2.0 * (b.thermal + b.microthermal
                                          + b.tau_gradient + b.r_gradient) + b.coupling
            assert abs(f.e1[0] - recombined) <= 1e-14 * abs(f.e1[0])

    def test_positivity_and_gronwall_envelope(self, op3_back):
        traj = run_forward(op3_back, sine_init(op3_back.grid), 5e-5, 200)
        f = backward_functionals(traj, op3_back)
        assert (f.cal_e[1:] > 0.0).all()
        assert math.isfinite(f.gronwall_k)
        t0, c0 = f.times[1], f.cal_e[1]
        bound = c0 * np.exp(4.0 * f.gronwall_k * (f.times[1:] - t0))
        assert (f.cal_e[1:] <= bound * (1 + 1e-9)).all()

    def test_indefinite_pairs_rejected(self, op3_back, op2_back):
        traj = run_forward(op3_back, sine_init(op3_back.grid), 5e-5, 10)
        with pytest.raises(IndefiniteForm):
            backward_functionals(traj, op3_back, eps=0.5, lam=0.1)
        traj2 = run_forward(op2_back, sine_init(op2_back.grid), 0.01, 10)
        # conservative moduli admit no valid pair: rate coefficients vanish
        with pytest.raises(IndefiniteForm):
            backward_functionals(traj2, op2_back)

    def test_parameter_domains(self, op3_back):
        traj = run_forward(op3_back, sine_init(op3_back.grid), 5e-5, 10)
        with pytest.raises(ValueError):
            backward_functionals(traj, op3_back, eps=1.5)
        with pytest.raises(ValueError):
            backward_functionals(traj, op3_back, lam=-1.0)

    def test_identity_residual(self, op3_back, moduli3):
        assert backward_identity_residual(op3_back, State1D.zeros(16)) == 0.0
        rng = np.random.default_rng(5)
        s = random_state(16, rng)
        from microtherm import staggered_difference
        h = op3_back.grid.h
        m = moduli3
        du = staggered_difference(s.u, h)
        dtau = staggered_difference(s.tau, h)
        dr = staggered_difference(s.r, h)
        lhs = h * (m.m_uu * du @ du + m.c_cap * s.theta @ s.theta
                   + m.alpha_m * s.m @ s.m)
        rhs = h * (m.rho * s.v @ s.v + m.k_cond * dtau @ dtau
                   + m.m_rr * dr @ dr)
        got = backward_identity_residual(op3_back, s)
        assert got == pytest.approx(lhs - rhs, rel=1e-12)


class TestLocalizationProbe:
    def test_trivial_zero_data_flagged(self, op2, op2_back):
        probe = localization_probe(op2, op2_back, InitialData.zeros(16), 0.01, 10)
        assert probe.trivial
        assert math.isnan(probe.min_energy_ratio)
        assert probe.round_trip_error == 0.0

    def test_type2_round_trip_certified(self, op2, op2_back):
        probe = localization_probe(op2, op2_back, sine_init(op2.grid), 0.01, 400)
        assert not probe.trivial
        assert probe.energy_positive
        assert probe.min_energy_ratio == pytest.approx(1.0, abs=1e-10)
        assert probe.round_trip_error <= 1e-8

    def test_type3_energy_stays_positive(self, op3, op3_back):
        probe = localization_probe(op3, op3_back, sine_init(op3.grid), 0.01, 400)
        assert probe.energy_positive
        assert 0.0 < probe.min_energy_ratio < 1.0
        # the reversed run amplifies beyond float range; recorded, not raised
        assert probe.round_trip_error == math.inf
