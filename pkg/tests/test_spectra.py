import itertools
import math

import numpy as np
import pytest

from tpslab import (
    HermiticityError,
    Tps,
    eig_decompose,
    entropy,
    evolve,
    identity_tps,
    is_interaction_free,
    kronecker_sum,
    random_hermitian,
    random_state,
    random_unitary,
    sumset_decompose,
    transform,
)
from tpslab.spectra import SumsetDecomposition

PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def exhaustive_pair_decompositions(spectrum, tol=1e-9):
    """Brute-force oracle for shape (2, 2): try every pair of spectrum
    values as the nonzero elements of the two local lists."""
    spectrum = np.sort(np.asarray(spectrum, dtype=float))
    offset = spectrum[0]
    shifted = spectrum - offset
    found = []
    for a in shifted[1:]:
        for b in shifted[1:]:
            cross = np.sort([0.0, a, b, a + b])
            if np.max(np.abs(cross - shifted)) <= tol:
                found.append((tuple(np.sort([0.0, a]) + offset), (0.0, b)))
    return found


class TestKroneckerSum:
    def test_diagonal_expansion(self):
        ks = kronecker_sum([np.diag([0.0, 1.0]), np.diag([0.0, 2.0])])
        np.testing.assert_allclose(np.diagonal(ks).real, [0.0, 2.0, 1.0, 3.0])

    def test_spectrum_is_cross_sum_multiset(self):
        h1, h2 = random_hermitian(2, 1), random_hermitian(3, 2)
        ks = kronecker_sum([h1, h2])
        w1, w2 = np.linalg.eigvalsh(h1), np.linalg.eigvalsh(h2)
        cross = np.sort([a + b for a in w1 for b in w2])
        np.testing.assert_allclose(np.linalg.eigvalsh(ks), cross, atol=1e-10)

    def test_entropies_constant_under_flow(self):
        ks = kronecker_sum([random_hermitian(2, 3), random_hermitian(2, 4)])
        eig = eig_decompose(ks)
        psi = random_state(4, 5)
        t_id = identity_tps((2, 2))
        base = [entropy(t_id, psi, k) for k in range(2)]
        for t in np.linspace(0.0, 8.0, 17):
            state = evolve(eig, psi, float(t))
            for k in range(2):
                assert abs(entropy(t_id, state, k) - base[k]) < 1e-10

    def test_needs_two_terms(self):
        with pytest.raises(ValueError, match="two"):
            kronecker_sum([np.eye(2)])

    def test_rejects_non_hermitian(self):
        with pytest.raises(HermiticityError):
            kronecker_sum([np.array([[0, 1], [0, 0]]), np.eye(2)])

    def test_three_factors(self):
        terms = [np.diag([0.0, 1.0]), np.diag([0.0, 2.0]), np.diag([0.0, 4.0])]
        ks = kronecker_sum(terms)
        np.testing.assert_allclose(np.sort(np.diagonal(ks).real), np.arange(8.0))


class TestSumsetDecompose:
    def test_textbook_example(self):
        dec = sumset_decompose([0.0, 1.0, 2.0, 3.0], (2, 2))
        assert dec is not None
        np.testing.assert_allclose(dec.local_spectra[0], [0.0, 1.0])
        np.testing.assert_allclose(dec.local_spectra[1], [0.0, 2.0])

    def test_against_exhaustive_oracle(self):
        spectrum = [0.0, 1.0, 2.0, 3.0]
        oracle = exhaustive_pair_decompositions(spectrum)
        assert oracle, "oracle found no decomposition"
        dec = sumset_decompose(spectrum, (2, 2))
        pair = (tuple(dec.local_spectra[0]), tuple(dec.local_spectra[1]))
        assert any(np.allclose(pair[0], o[0]) and np.allclose(pair[1], o[1]) for o in oracle)

    def test_refutation_matches_exhaustive_oracle(self):
        spectrum = [0.0, 1.0, 2.0, 4.0]
        assert exhaustive_pair_decompositions(spectrum) == []
        assert sumset_decompose(spectrum, (2, 2)) is None

    def test_round_trip_constructor(self):
        ks = kronecker_sum([np.diag([0.0, 1.0]), np.diag([0.0, np.pi])])
        w = np.sort(np.linalg.eigvalsh(ks))
        dec = sumset_decompose(w, (2, 2))
        assert dec is not None
        np.testing.assert_allclose(dec.local_spectra[0], [0.0, 1.0], atol=1e-10)
        np.testing.assert_allclose(dec.local_spectra[1], [0.0, np.pi], atol=1e-10)

    def test_offset_convention(self):
        dec = sumset_decompose([-5.0, -4.0, -3.0, -2.0], (2, 2))
        assert dec is not None
        assert dec.local_spectra[0][0] == pytest.approx(-5.0)
        for spec in dec.local_spectra[1:]:
            assert spec[0] == pytest.approx(0.0)
        assert dec.offset_convention == "first-absorbs"

    def test_three_factor_round_trip(self):
        rng = np.random.default_rng(6)
        locals_ = [np.sort(rng.standard_normal(d)) for d in (2, 2, 2)]
        spectrum = np.sort(
            [a + b + c for a in locals_[0] for b in locals_[1] for c in locals_[2]]
        )
        dec = sumset_decompose(spectrum, (2, 2, 2))
        assert dec is not None
        np.testing.assert_allclose(dec.cross_sums(), spectrum, atol=1e-9)

    def test_mixed_dims_round_trip(self):
        rng = np.random.default_rng(7)
        locals_ = [np.sort(rng.standard_normal(d)) * 2 for d in (2, 3)]
        spectrum = np.sort([a + b for a in locals_[0] for b in locals_[1]])
        dec = sumset_decompose(spectrum, (2, 3))
        assert dec is not None
        np.testing.assert_allclose(dec.cross_sums(), spectrum, atol=1e-9)

    def test_generic_spectra_rejected(self):
        rng = np.random.default_rng(8)
        for dims in ((2, 2), (2, 3), (2, 2, 2)):
            for _ in range(20):
                w = np.sort(rng.standard_normal(math.prod(dims)))
                assert sumset_decompose(w, dims) is None

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="spectrum"):
            sumset_decompose([0.0, 1.0], (2, 2))

    def test_cross_sums_helper(self):
        dec = SumsetDecomposition((np.array([0.0, 1.0]), np.array([0.0, 2.0])))
        np.testing.assert_allclose(dec.cross_sums(), [0.0, 1.0, 2.0, 3.0])


class TestIsInteractionFree:
    def test_kronecker_sum_accepted(self):
        ks = kronecker_sum([random_hermitian(2, 9), random_hermitian(2, 10)])
        chk = is_interaction_free(ks, identity_tps((2, 2)))
        assert chk.interaction_free
        assert chk.residual < 1e-10

    def test_pure_interaction_rejected_with_full_norm(self):
        zz = np.kron(PAULI_Z, PAULI_Z)
        chk = is_interaction_free(zz, identity_tps((2, 2)))
        assert not chk.interaction_free
        assert chk.residual == pytest.approx(np.linalg.norm(zz), abs=1e-12)

    def test_scrambled_covariance(self):
        ks = kronecker_sum([random_hermitian(2, 11), random_hermitian(2, 12)])
        u = random_unitary(4, 13)
        chk = is_interaction_free(u @ ks @ u.conj().T, transform(identity_tps((2, 2)), u))
        assert chk.interaction_free
        assert chk.residual < 1e-9

    def test_mixed_shape(self):
        ks = kronecker_sum([random_hermitian(2, 14), random_hermitian(3, 15)])
        assert is_interaction_free(ks, identity_tps((2, 3))).interaction_free

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            is_interaction_free(np.eye(6), identity_tps((2, 2)))

    def test_consistency_with_sumset(self):
        # constructive: an interaction-free Hamiltonian in some TPS has a
        # decomposable spectrum, and the identity-TPS of the decomposition
        # direction reproduces it
        for seed in range(5):
            terms = [random_hermitian(2, 100 + seed), random_hermitian(2, 200 + seed)]
            ks = kronecker_sum(terms)
            w = np.sort(np.linalg.eigvalsh(ks))
            assert sumset_decompose(w, (2, 2)) is not None
            assert is_interaction_free(ks, identity_tps((2, 2))).interaction_free

    def test_generic_h_not_free_and_not_decomposable(self):
        for seed in range(5):
            h = random_hermitian(4, 300 + seed)
            w = np.sort(np.linalg.eigvalsh(h))
            assert sumset_decompose(w, (2, 2)) is None
            assert not is_interaction_free(h, identity_tps((2, 2))).interaction_free
