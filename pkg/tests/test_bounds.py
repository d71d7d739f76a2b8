"""Bound evaluation: saturation, closed forms, hierarchy, crossing inversion."""

import math

import numpy as np
import pytest

from qslkit.bounds import (
    conservative_bound_diagnostics,
    first_crossing_time,
    quantumness_dephasing,
    quantumness_dissipation,
    quarter_theta_unitary_report,
    speed_dissipation,
    tau_b_fidelity,
    tau_q_at_crossing,
    tau_q_dephasing,
    tau_q_from_trajectory,
    tau_q_unitary,
)
from qslkit.generators import (
    Dephasing,
    Dissipation,
    Schedule,
    UnitaryControl,
    UnitaryTwoLevel,
    apply_generator,
    dissipation_closed_state,
    propagate,
    unitary_state,
)
from qslkit.matcore import from_pure
from qslkit.memory import MemoryFunctions, OUParams, markov_dissipation, riccati_p
from qslkit.witness import generation_speed, quantumness


def markov_dephasing_trajectory(theta, tau=1.0, n=2001):
    mem = MemoryFunctions.markov_limit(1.0)
    rho0 = from_pure([math.cos(theta), math.sin(theta)])
    traj = propagate(Dephasing(mem), rho0, np.linspace(0.0, tau, n))
    return traj, mem


class TestTauQFromTrajectory:
    def test_null_dynamics_returns_zero(self):
        # diagonal initial state: no coherence channel, Q and speed identically zero
        traj, _ = markov_dephasing_trajectory(0.0, tau=1.0, n=201)
        assert tau_q_from_trajectory(traj, 1.0) == 0.0

    def test_markov_dephasing_saturates(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0)
        assert tau_q_from_trajectory(traj, 1.0) == pytest.approx(1.0, abs=1e-4)

    def test_markov_dissipation_saturates(self):
        theta, tau, n = math.pi / 4.0, 1.0, 2001
        params = OUParams(1.0, math.inf)
        mem = markov_dissipation(np.linspace(0.0, tau, 2 * n - 1), params)
        rho0 = from_pure([math.cos(theta), math.sin(theta)])
        traj = propagate(Dissipation(mem), rho0, np.linspace(0.0, tau, n))
        assert tau_q_from_trajectory(traj, tau) == pytest.approx(1.0, abs=1e-3)

    def test_time_outside_grid_rejected(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=1.0, n=201)
        with pytest.raises(ValueError, match="outside trajectory grid"):
            tau_q_from_trajectory(traj, 2.0)


class TestQuantumnessDephasing:
    def test_zero_exponent(self):
        assert quantumness_dephasing(math.pi / 8.0, 0.0) == 0.0

    def test_full_dephasing_limit(self):
        assert quantumness_dephasing(math.pi / 8.0, 1e9) == pytest.approx(0.25, abs=1e-12)

    def test_reference_value(self):
        expected = 0.25 * (1.0 - math.exp(-2.0)) ** 2
        assert quantumness_dephasing(math.pi / 8.0, 2.0) == pytest.approx(expected, abs=1e-15)


class TestTauQDephasing:
    def test_vanishing_target(self):
        assert tau_q_dephasing(0.0, math.pi / 8.0, MemoryFunctions.markov_limit(1.0)) == 0.0

    def test_markov_closed_form_inverts_witness(self):
        mem = MemoryFunctions.markov_limit(1.0)
        q_val = 0.25 * (1.0 - math.exp(-2.0)) ** 2
        assert tau_q_dephasing(q_val, math.pi / 8.0, mem) == pytest.approx(1.0, abs=1e-10)

    def test_memory_slows_quantumness_generation(self):
        q_val = 0.1
        t_markov = tau_q_dephasing(q_val, math.pi / 8.0, MemoryFunctions.markov_limit(1.0))
        t_memory = tau_q_dephasing(q_val, math.pi / 8.0, MemoryFunctions(OUParams(1.0, 0.1)))
        assert t_memory > t_markov

    def test_bisection_solves_exponent_equation(self):
        mem = MemoryFunctions(OUParams(1.0, 0.4))
        theta, q_val = math.pi / 5.0, 0.05
        tau = tau_q_dephasing(q_val, theta, mem)
        beta_target = -math.log1p(-2.0 * math.sqrt(q_val) / abs(math.sin(4.0 * theta)))
        assert mem.beta(tau) == pytest.approx(beta_target, rel=1e-8)

    def test_unreachable_target_rejected(self):
        with pytest.raises(ValueError, match="unreachable quantumness"):
            tau_q_dephasing(0.9, math.pi / 8.0, MemoryFunctions.markov_limit(1.0))

    def test_degenerate_angle_rejected(self):
        with pytest.raises(ValueError, match="no coherence channel"):
            tau_q_dephasing(0.1, math.pi / 4.0, MemoryFunctions.markov_limit(1.0))

    @pytest.mark.parametrize("theta", [math.pi / 5.0])
    def test_monotone_decreasing_in_memory_rate(self, theta):
        q_val = 0.02
        taus = [
            tau_q_dephasing(q_val, theta, MemoryFunctions(OUParams(1.0, g)))
            for g in (0.1, 0.3, 0.5, 1.0, 2.0)
        ]
        assert all(a > b for a, b in zip(taus, taus[1:]))


class TestTauQUnitary:
    def test_constant_drive_saturates(self):
        control = UnitaryControl.constant(theta_rate=0.5, alpha=0.0)
        assert tau_q_unitary(control, 1.0) == pytest.approx(1.0, abs=1e-6)

    def test_phase_invariance_is_exact(self):
        values = [
            tau_q_unitary(UnitaryControl.constant(theta_rate=0.5, alpha=a), 1.0)
            for a in (0.0, math.pi / 3.0, 1.2)
        ]
        assert max(values) - min(values) < 1e-12

    def test_commuting_endpoint_rejected(self):
        control = UnitaryControl.constant(theta_rate=math.pi / 2.0, alpha=0.0)
        with pytest.raises(ValueError, match="commuting endpoint"):
            tau_q_unitary(control, 1.0)  # theta(tau) = pi/2

    def test_negative_speed_argument_surfaced(self):
        # mixed-rate drive near the angle where the closed form turns negative
        control = UnitaryControl(
            theta0=0.76,
            theta_rate=Schedule.constant(1.0),
            alpha=Schedule.ramp(math.pi / 4.0, 0.1088),
        )
        with pytest.raises(ValueError, match="negative speed argument"):
            tau_q_unitary(control, 1.0)

    def test_pinned_quarter_angle_report(self):
        rep = quarter_theta_unitary_report(alpha_rate=0.8, tau=1.0)
        assert rep["tau_q_numeric"] == pytest.approx(1.0, abs=1e-4)
        assert rep["closed_form_tau_over_alpha"] == pytest.approx(1.0 / 0.8, abs=1e-12)
        assert rep["closed_form_sin_alpha_over_rate"] == pytest.approx(
            math.sin(0.8) / 0.8, abs=1e-12
        )
        # the bound must not exceed the exact elapsed time
        assert rep["tau_q_numeric"] <= rep["tau"] + 1e-6


class TestQuantumnessDissipation:
    def test_zero_integrals(self):
        assert quantumness_dissipation(math.pi / 5.0, 0.0, 0.0) == 0.0

    def test_equal_superposition_real_branch(self):
        b = 0.8
        expected = (1.0 - math.exp(-2.0 * b)) ** 2
        assert quantumness_dissipation(math.pi / 4.0, b, 0.0) == pytest.approx(expected, abs=1e-12)

    def test_full_relaxation_reaches_maximum(self):
        assert quantumness_dissipation(math.pi / 4.0, 1e3, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_angle_rejected(self):
        with pytest.raises(ValueError, match="identically zero"):
            quantumness_dissipation(0.0, 1.0, 0.0)

    def test_matches_witness_of_closed_state(self):
        theta = math.pi / 5.0
        mem = riccati_p(np.linspace(0.0, 2.0, 4001), OUParams(1.0, 0.5))
        rho0 = from_pure([math.cos(theta), math.sin(theta)])
        for tau in (0.5, 1.0, 2.0):
            idx = mem.index_of(tau)
            q_closed = quantumness_dissipation(theta, float(mem.b[idx]), float(mem.c[idx]))
            q_witness = quantumness(rho0, dissipation_closed_state(theta, tau, mem))
            assert q_closed == pytest.approx(q_witness, abs=1e-9)


class TestSpeedDissipation:
    def test_markov_initial_speed(self):
        mem = markov_dissipation(np.linspace(0.0, 1.0, 101), OUParams(1.0, math.inf))
        assert speed_dissipation(math.pi / 4.0, 0.0, mem) == pytest.approx(
            1.0 / math.sqrt(2.0), abs=1e-12
        )

    def test_markov_exponential_decay(self):
        mem = markov_dissipation(np.linspace(0.0, 2.0, 201), OUParams(1.0, math.inf))
        for t in (0.5, 1.0, 2.0):
            assert speed_dissipation(math.pi / 4.0, t, mem) == pytest.approx(
                math.exp(-t) / math.sqrt(2.0), abs=1e-12
            )

    def test_matches_compositional_route(self):
        theta, t = math.pi / 5.0, 1.0
        mem = riccati_p(np.linspace(0.0, 1.0, 2001), OUParams(1.0, 0.5))
        gen = Dissipation(mem)
        rho0 = from_pure([math.cos(theta), math.sin(theta)])
        rho_t = dissipation_closed_state(theta, t, mem)
        composed = generation_speed(rho0, apply_generator(gen, rho_t, t))
        assert speed_dissipation(theta, t, mem) == pytest.approx(composed, abs=1e-7)

    def test_time_off_grid_rejected(self):
        mem = markov_dissipation(np.linspace(0.0, 1.0, 101), OUParams(1.0, math.inf))
        with pytest.raises(ValueError):
            speed_dissipation(math.pi / 4.0, 1.7, mem)


class TestTauBFidelity:
    def test_zero_time(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=1.0, n=201)
        assert tau_b_fidelity(traj, 0.0) == 0.0

    def test_markov_dephasing_closed_form(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0)
        expected = abs(math.sin(math.pi / 4.0)) * (1.0 - math.exp(-2.0)) / (2.0 * math.sqrt(2.0))
        assert tau_b_fidelity(traj, 1.0) == pytest.approx(expected, abs=1e-6)

    def test_weaker_than_commutator_bound(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0)
        assert tau_b_fidelity(traj, 1.0) < tau_q_from_trajectory(traj, 1.0)

    def test_frozen_initial_state_rejected(self):
        # finite-memory kernel: the rate vanishes at t = 0
        theta = math.pi / 5.0
        mem = MemoryFunctions(OUParams(1.0, 0.5))
        rho0 = from_pure([math.cos(theta), math.sin(theta)])
        traj = propagate(Dephasing(mem), rho0, np.linspace(0.0, 1.0, 201))
        with pytest.raises(ValueError, match="frozen initial state"):
            tau_b_fidelity(traj, 1.0, denominator="initial")
        assert tau_b_fidelity(traj, 1.0, denominator="averaged") > 0.0

    def test_unknown_variant_rejected(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=1.0, n=201)
        with pytest.raises(ValueError, match="unknown denominator"):
            tau_b_fidelity(traj, 1.0, denominator="endpoint")


class TestFirstCrossing:
    def test_zero_target(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=1.0, n=201)
        crossing = first_crossing_time(traj, 0.0)
        assert crossing.reached and crossing.time == 0.0

    def test_markov_dephasing_reference_crossing(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=1.5)
        q_val = 0.25 * (1.0 - math.exp(-2.0)) ** 2
        crossing = first_crossing_time(traj, q_val)
        assert crossing.reached
        assert crossing.time == pytest.approx(1.0, abs=1e-4)

    def test_unreached_target_reports_max(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=0.5, n=501)
        crossing = first_crossing_time(traj, 0.9)
        assert not crossing.reached
        assert crossing.time is None
        assert crossing.q_max == pytest.approx(float(np.max(traj.q_samples)), abs=0.0)

    def test_nonmonotone_witness_returns_first_crossing(self):
        # rotation drive through the half-filled angle: witness peaks then falls
        control = UnitaryControl.constant(theta_rate=1.0, alpha=0.0)
        rho0 = from_pure(unitary_state(0.0, 0.0))
        traj = propagate(UnitaryTwoLevel(control), rho0, np.linspace(0.0, 2.5, 2501))
        crossing = first_crossing_time(traj, 0.5)
        assert crossing.reached
        assert crossing.time == pytest.approx(math.pi / 8.0, abs=1e-6)  # sin^2(2t) = 1/2

    def test_negative_target_rejected(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0, tau=0.5, n=101)
        with pytest.raises(ValueError):
            first_crossing_time(traj, -0.1)


class TestSaturationAndValidity:
    @pytest.mark.parametrize("theta", [math.pi / 8.0, math.pi / 5.0, math.pi / 6.0])
    @pytest.mark.parametrize("gamma", [None, 0.1, 0.5, 2.0])
    def test_dephasing_saturation(self, theta, gamma):
        if gamma is None:
            mem = MemoryFunctions.markov_limit(1.0)
        else:
            mem = MemoryFunctions(OUParams(1.0, gamma))
        rho0 = from_pure([math.cos(theta), math.sin(theta)])
        n = max(2001, int(150 * (gamma or 1.0)) + 1)
        traj = propagate(Dephasing(mem), rho0, np.linspace(0.0, 3.0, n))
        for q_target in np.geomspace(1e-3, 0.95, 8) * float(np.max(traj.q_samples)):
            crossing = first_crossing_time(traj, float(q_target))
            assert crossing.reached
            tau_q = tau_q_at_crossing(traj, crossing)
            assert tau_q == pytest.approx(crossing.time, rel=1e-4)

    def test_conservative_bounds_are_weaker(self):
        traj, _ = markov_dephasing_trajectory(math.pi / 8.0)
        diag = conservative_bound_diagnostics(traj, 1.0)
        assert diag["tau_product"] <= diag["tau_q"] + 1e-9
        assert diag["tau_norm_product"] <= diag["tau_product"] + 1e-9
        assert diag["tau_generator_norm"] <= diag["tau_norm_product"] + 1e-9
