"""Matrix-free Hamiltonian against explicit Kronecker-product construction."""
import numpy as np
import pytest

from topoprobe.hamiltonians import (
    HamiltonianSpec,
    compile_hamiltonian,
    dense_matrix,
    magnetization_diagonal,
    matvec,
)
from topoprobe.spincore import all_up_state, random_state

# N=2 coupling block of the exchange term in the spin basis (up,up / down,up /
# up,down / down,down with site 0 the low bit): XX+YY flips the middle two
XX_CHAIN_2SITES = np.array([
    [0, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 0],
], dtype=complex)


def random_spec(rng, num_sites=6):
    return HamiltonianSpec(
        num_sites=num_sites,
        j=1.0,
        j_prime=float(rng.uniform(0.1, 4.0)),
        delta=float(rng.uniform(0.0, 2.0)),
        b_field=float(rng.uniform(-0.3, 0.3)),
        neel_delta=float(rng.uniform(0.0, 1.0)),
        neel_weight=1.0,
        pinning=0.05,
    )


class TestSpecValidation:
    def test_odd_sites_rejected(self):
        with pytest.raises(ValueError, match="even"):
            HamiltonianSpec(num_sites=5)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError, match=">= 4"):
            HamiltonianSpec(num_sites=2)

    def test_default_pinning_tracks_j(self):
        assert HamiltonianSpec(num_sites=4, j=2.0).pinning == pytest.approx(0.1)
        assert HamiltonianSpec(num_sites=4, pinning=0.0).pinning == 0.0

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            HamiltonianSpec(num_sites=4, delta=np.inf)


class TestMatvec:
    def test_polarized_state_annihilated(self):
        # only flip terms act on the all-up state; with delta = 0 and no
        # fields every term gives zero
        spec = HamiltonianSpec(num_sites=4, j=1.0, j_prime=0.0, delta=0.0, pinning=0.0)
        out = matvec(spec, all_up_state(4))
        assert np.max(np.abs(out)) == 0.0

    def test_decoupled_dimer_ground_energy(self):
        # j_prime = 0 makes two independent strong bonds; each contributes
        # the singlet energy -3/2 J at delta = 1
        spec = HamiltonianSpec(num_sites=4, j=1.0, j_prime=0.0, delta=1.0, pinning=0.0)
        energies = np.linalg.eigvalsh(dense_matrix(spec))
        assert energies[0] == pytest.approx(-3.0, abs=1e-12)

    def test_hermiticity_inner_products(self, rng):
        spec = random_spec(rng)
        phi = random_state(6, rng)
        psi = random_state(6, rng)
        left = np.vdot(phi.amplitudes, matvec(spec, psi))
        right = np.vdot(psi.amplitudes, matvec(spec, phi))
        assert abs(left - np.conj(right)) < 1e-10

    def test_dimension_mismatch(self, rng):
        spec = HamiltonianSpec(num_sites=6)
        with pytest.raises(ValueError, match="sites"):
            matvec(spec, random_state(4, rng))


class TestDenseOracle:
    def test_known_two_site_block(self):
        # pure XX chain at N=4 with the weak bonds off: the strong-bond
        # blocks must match the hand-written two-site matrix
        spec = HamiltonianSpec(num_sites=4, j=1.0, j_prime=0.0, delta=0.0, pinning=0.0)
        dense = dense_matrix(spec)
        block = dense[:4, :4]
        np.testing.assert_allclose(block, XX_CHAIN_2SITES, atol=1e-14)

    def test_matvec_matches_dense_on_basis_vectors(self):
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=0.7, delta=0.3,
                               b_field=0.2, neel_delta=0.4, neel_weight=1.0)
        dense = dense_matrix(spec)
        compiled = compile_hamiltonian(spec)
        for k in range(spec.dim):
            unit = np.zeros(spec.dim, dtype=complex)
            unit[k] = 1.0
            np.testing.assert_allclose(compiled.apply(unit), dense[:, k], atol=1e-12)

    @pytest.mark.parametrize("num_sites", [4, 6, 8])
    def test_matvec_matches_dense_on_random_vectors(self, num_sites, rng):
        spec = random_spec(rng, num_sites)
        dense = dense_matrix(spec)
        compiled = compile_hamiltonian(spec)
        for _ in range(100):
            vec = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
            vec /= np.linalg.norm(vec)
            np.testing.assert_allclose(compiled.apply(vec), dense @ vec, atol=1e-12)

    def test_eigenvalues_real(self, rng):
        spec = random_spec(rng)
        evals = np.linalg.eigvals(dense_matrix(spec))
        assert np.max(np.abs(evals.imag)) < 1e-10

    def test_size_guard(self):
        with pytest.raises(ValueError, match="N <= 10"):
            dense_matrix(HamiltonianSpec(num_sites=12))


def _mirror_table(num_sites):
    indices = np.arange(2 ** num_sites)
    out = np.zeros_like(indices)
    for new_site in range(num_sites):
        out |= ((indices >> (num_sites - 1 - new_site)) & 1) << new_site
    return out


class TestSymmetries:
    def test_magnetization_conserved_without_breaking_term(self, rng):
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=1.3, delta=0.5,
                               b_field=0.0, neel_delta=0.7, neel_weight=1.0)
        compiled = compile_hamiltonian(spec)
        mz = magnetization_diagonal(6)
        psi = random_state(6, rng).amplitudes
        commutator = compiled.apply(mz * psi) - mz * compiled.apply(psi)
        assert np.max(np.abs(commutator)) < 1e-10
        assert abs(np.vdot(psi, commutator)) < 1e-10

    def test_magnetization_broken_by_b_field(self, rng):
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=1.3, delta=0.5, b_field=0.4)
        compiled = compile_hamiltonian(spec)
        mz = magnetization_diagonal(6)
        psi = random_state(6, rng).amplitudes
        commutator = compiled.apply(mz * psi) - mz * compiled.apply(psi)
        assert np.max(np.abs(commutator)) > 1e-3

    def test_reflection_symmetry_clean_chain(self, rng):
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=2.0, delta=0.8,
                               b_field=0.0, neel_delta=0.0, pinning=0.0)
        compiled = compile_hamiltonian(spec)
        mirror = _mirror_table(6)
        psi = random_state(6, rng).amplitudes
        h_then_mirror = compiled.apply(psi)[mirror]
        mirror_then_h = compiled.apply(psi[mirror])
        assert np.max(np.abs(h_then_mirror - mirror_then_h)) < 1e-10

    def test_reflection_broken_by_pinning(self, rng):
        spec = HamiltonianSpec(num_sites=6, j=1.0, j_prime=2.0, delta=0.8,
                               b_field=0.0, neel_delta=0.0, pinning=0.05)
        compiled = compile_hamiltonian(spec)
        mirror = _mirror_table(6)
        psi = random_state(6, rng).amplitudes
        difference = compiled.apply(psi)[mirror] - compiled.apply(psi[mirror])
        assert np.max(np.abs(difference)) > 1e-3
