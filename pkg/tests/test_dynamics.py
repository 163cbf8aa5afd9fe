"""Trotterized evolution: splitting order, norm and energy conservation,
adiabatic ramp behavior."""
import numpy as np
import pytest

from topoprobe.dynamics import (
    RampSpec,
    TrotterStepper,
    adiabatic_evolve,
    evolve,
    monitor_invariants,
)
from topoprobe.hamiltonians import HamiltonianSpec, dense_matrix
from topoprobe.partitions import reflection_partition
from topoprobe.rdm import exact_invariant
from topoprobe.spincore import neel_state, random_state


class TestRampSpec:
    def test_weight_endpoints(self):
        ramp = RampSpec(t_final=20.0)
        assert ramp.weight(0.0) == pytest.approx(1.0)
        assert ramp.weight(20.0) == pytest.approx(0.0)

    def test_invalid_dt(self):
        with pytest.raises(ValueError, match="dt"):
            RampSpec(t_final=1.0, dt=2.0)

    def test_sample_times_bounds(self):
        with pytest.raises(ValueError, match="sample time"):
            RampSpec(t_final=1.0, dt=0.1, sample_times=(2.0,))


class TestTrotterAccuracy:
    def test_second_order_convergence(self, rng):
        # halving dt must cut the final-state error by about four
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=1.7, delta=0.4, pinning=0.05)
        dense = dense_matrix(spec)
        evals, evecs = np.linalg.eigh(dense)
        psi0 = random_state(6, rng)
        t_total = 1.0
        reference = evecs @ (np.exp(-1j * evals * t_total)
                             * (evecs.conj().T @ psi0.amplitudes))
        errors = [np.linalg.norm(evolve(spec, psi0, t_total, dt).amplitudes - reference)
                  for dt in (0.04, 0.02, 0.01)]
        for coarse, fine in zip(errors, errors[1:]):
            assert 2.0 <= coarse / fine <= 8.0

    def test_second_order_with_time_dependence(self):
        # midpoint evaluation keeps the ramp itself second order
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=0.5, delta=0.25, pinning=0.0)
        ramp_args = dict(t_final=2.0, neel_delta=20.0)
        reference = adiabatic_evolve(spec, RampSpec(dt=0.0025, **ramp_args))[-1][1]
        errors = []
        for dt in (0.02, 0.01):
            final = adiabatic_evolve(spec, RampSpec(dt=dt, **ramp_args))[-1][1]
            errors.append(np.linalg.norm(final.amplitudes - reference.amplitudes))
        assert 2.0 <= errors[0] / errors[1] <= 8.0

    def test_norm_preserved(self, rng):
        spec = HamiltonianSpec(num_sites=8, j=1.0, j_prime=2.0, delta=0.25)
        state = random_state(8, rng)
        out = evolve(spec, state, 5.0, dt=0.01)
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-8

    def test_energy_conserved_from_eigenstate(self, ground_state_cache):
        # an eigenstate start suppresses the O(dt^2) splitting oscillation,
        # leaving only the higher-order drift
        kwargs = dict(num_sites=8, j=1.0, j_prime=2.0, delta=0.25, pinning=0.05)
        result = ground_state_cache(**kwargs)
        spec = HamiltonianSpec(**kwargs)
        stepper = TrotterStepper(spec, 0.01)
        amps = result.state.amplitudes
        reference = result.energy
        worst = 0.0
        from topoprobe.hamiltonians import compile_hamiltonian

        compiled = compile_hamiltonian(spec)
        for step in range(1000):
            amps = stepper.step(amps, spec.neel_weight)
            if step % 100 == 99:
                energy = float(np.real(np.vdot(amps, compiled.apply(amps))))
                worst = max(worst, abs(energy - reference))
        assert worst <= 1e-6


class TestAdiabaticRamp:
    def test_sudden_quench_stays_neel(self):
        spec = HamiltonianSpec(num_sites=8, j=1.0, j_prime=0.5, delta=0.25)
        snapshots = adiabatic_evolve(spec, RampSpec(t_final=0.02, dt=0.02, neel_delta=40.0))
        final = snapshots[-1][1]
        overlap = abs(np.vdot(final.amplitudes, neel_state(8).amplitudes))
        assert overlap > 0.99

    def test_slow_ramp_reaches_ground_state(self, ground_state_cache):
        kwargs = dict(num_sites=12, j=1.0, j_prime=0.5, delta=0.25)
        target = ground_state_cache(**kwargs).state
        spec = HamiltonianSpec(**kwargs)
        snapshots = adiabatic_evolve(spec, RampSpec(t_final=20.0, dt=0.01, neel_delta=40.0))
        overlap = abs(np.vdot(snapshots[-1][1].amplitudes, target.amplitudes))
        assert overlap > 0.9

    def test_weak_field_warns(self):
        spec = HamiltonianSpec(num_sites=4, j=1.0, j_prime=0.5, delta=0.25)
        with pytest.warns(UserWarning, match="staggered field"):
            adiabatic_evolve(spec, RampSpec(t_final=0.1, dt=0.05, neel_delta=2.0))


@pytest.fixture(scope="module")
def ramp_snapshots():
    spec = HamiltonianSpec(num_sites=12, j=1.0, j_prime=0.5, delta=0.25)
    ramp = RampSpec(t_final=20.0, dt=0.01, neel_delta=40.0,
                    sample_times=(0.0, 10.0, 20.0))
    return spec, adiabatic_evolve(spec, ramp)


class TestMonitoring:
    def test_neel_start_has_zero_reflection_invariant(self, ramp_snapshots):
        _spec, snapshots = ramp_snapshots
        part = reflection_partition(12, 2)
        rows = monitor_invariants(snapshots[:1], part, ("reflection",), "exact")
        assert rows[0]["time"] == 0.0
        assert rows[0]["value"] == pytest.approx(0.0, abs=1e-12)

    def test_endpoint_matches_ground_state(self, ramp_snapshots, ground_state_cache):
        _spec, snapshots = ramp_snapshots
        part = reflection_partition(12, 2)
        target = ground_state_cache(num_sites=12, j=1.0, j_prime=0.5, delta=0.25).state
        exact_target = exact_invariant(target, part, "reflection").normalized
        rows = monitor_invariants(snapshots, part, ("reflection",), "exact")
        assert abs(rows[-1]["value"] - exact_target) <= 0.1

    def test_shorter_interval_orders_buildup(self, ramp_snapshots):
        # partially built order: the invariant magnitude grows as the
        # probed interval shrinks
        _spec, snapshots = ramp_snapshots
        mid_state = snapshots[1][1]
        magnitudes = [abs(exact_invariant(mid_state, reflection_partition(12, n),
                                          "reflection").normalized)
                      for n in (1, 2, 3)]
        assert magnitudes[0] > magnitudes[1] > magnitudes[2]

    def test_sampled_mode(self, ramp_snapshots):
        from topoprobe.protocols import ProtocolParams

        _spec, snapshots = ramp_snapshots
        part = reflection_partition(12, 2)
        params = ProtocolParams("reflection", 128, 64, part, 31)
        rows = monitor_invariants(snapshots[-1:], part, ("reflection",), "sampled", params)
        exact_rows = monitor_invariants(snapshots[-1:], part, ("reflection",), "exact")
        assert abs(rows[0]["value"] - exact_rows[0]["value"]) <= 4 * rows[0]["std_error"]

    def test_empty_snapshots_rejected(self):
        with pytest.raises(ValueError, match="snapshots"):
            monitor_invariants([], reflection_partition(8, 2))
