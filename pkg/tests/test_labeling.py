import numpy as np
import pytest

from tpslab import (
    ConditionError,
    LabelPolynomial,
    ZeroVectorError,
    apply_polynomial,
    canonical_basis,
    check_conditions,
    eig_decompose,
    evolve,
    evolution_operator,
    krylov_basis,
    random_hermitian,
    random_state,
    random_unitary,
    solve_label,
    vector_from_label,
)


class TestLabelPolynomial:
    def test_trims_trailing_zeros(self):
        p = LabelPolynomial([1.0, 2.0, 0.0, 0.0])
        assert p.degree == 1
        np.testing.assert_array_equal(p.coefficients, [1.0 + 0j, 2.0 + 0j])

    def test_zero_polynomial(self):
        assert LabelPolynomial([0.0, 0.0]).degree == 0

    def test_monomial_and_eval(self):
        p = LabelPolynomial.monomial(2, 3.0)
        assert p(2.0) == pytest.approx(12.0)

    def test_equality_and_hash(self):
        assert LabelPolynomial([1, 2]) == LabelPolynomial([1, 2, 0])
        assert hash(LabelPolynomial([1, 2])) == hash(LabelPolynomial([1, 2, 0]))


class TestCheckConditions:
    def test_passes_clean_instance(self):
        eig = eig_decompose(np.diag([0.0, 1.0, 2.0]))
        report = check_conditions(eig, np.ones(3) / np.sqrt(3))
        assert report.passed and report.failure_reason() is None

    def test_degenerate_spectrum_fails(self):
        eig = eig_decompose(np.diag([0.0, 0.0, 1.0]))
        report = check_conditions(eig, np.ones(3) / np.sqrt(3))
        assert not report.passed
        assert "degenerate" in report.failure_reason()

    def test_zero_overlap_fails(self):
        eig = eig_decompose(np.diag([0.0, 1.0, 2.0]))
        report = check_conditions(eig, eig.eigenvectors[:, 0])
        assert not report.passed
        assert "overlap" in report.failure_reason()


class TestApplyPolynomial:
    def test_constant_label_returns_input(self, instance6):
        _, eig, psi = instance6
        np.testing.assert_allclose(
            apply_polynomial(eig, LabelPolynomial.one(), psi), psi, atol=1e-12
        )

    def test_monomial_is_operator_action(self, instance6):
        h, eig, psi = instance6
        np.testing.assert_allclose(
            apply_polynomial(eig, LabelPolynomial.monomial(1), psi), h @ psi, atol=1e-10
        )

    def test_against_horner_oracle(self, instance6):
        h, eig, psi = instance6
        rng = np.random.default_rng(0)
        for _ in range(10):
            coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            # Horner evaluation of the matrix polynomial
            acc = np.zeros_like(h)
            for c in coeffs[::-1]:
                acc = acc @ h + c * np.eye(6)
            expected = acc @ psi
            got = apply_polynomial(eig, LabelPolynomial(coeffs), psi)
            np.testing.assert_allclose(got, expected, atol=1e-8)


class TestSolveLabel:
    def test_self_target_gives_constant(self, instance6):
        _, eig, psi = instance6
        label = solve_label(eig, psi, psi)
        expected = np.zeros(label.coefficients.size, dtype=complex)
        expected[0] = 1.0
        np.testing.assert_allclose(label.coefficients, expected, atol=1e-9)

    def test_two_point_linear_interpolation(self):
        eig = eig_decompose(np.diag([0.0, 1.0]))
        psi = np.array([1.0, 1.0]) / np.sqrt(2)
        target = np.array([1.0, -1.0]) / np.sqrt(2)
        label = solve_label(eig, psi, target)
        np.testing.assert_allclose(label.coefficients, [1.0, -2.0], atol=1e-12)

    def test_round_trip(self, instance6):
        _, eig, psi = instance6
        for seed in range(20):
            target = random_state(6, 900 + seed)
            label = solve_label(eig, psi, target)
            assert label.degree <= 5
            back = vector_from_label(eig, psi, label)
            assert np.linalg.norm(back - target) <= 1e-7

    def test_rejects_degenerate(self):
        eig = eig_decompose(np.diag([0.0, 0.0, 1.0]))
        with pytest.raises(ConditionError, match="degenerate"):
            solve_label(eig, np.ones(3) / np.sqrt(3), random_state(3, 1))

    def test_rejects_vanishing_overlap(self):
        eig = eig_decompose(np.diag([0.0, 1.0, 2.0]))
        with pytest.raises(ConditionError, match="overlap"):
            solve_label(eig, eig.eigenvectors[:, 1], random_state(3, 2))


class TestVectorFromLabel:
    def test_linearity(self, instance6):
        _, eig, psi = instance6
        rng = np.random.default_rng(3)
        for _ in range(20):
            a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            p = LabelPolynomial(rng.standard_normal(6) + 1j * rng.standard_normal(6))
            q = LabelPolynomial(rng.standard_normal(6) + 1j * rng.standard_normal(6))
            combo = LabelPolynomial(a * p.coefficients + b * q.coefficients)
            lhs = vector_from_label(eig, psi, combo)
            rhs = a * vector_from_label(eig, psi, p) + b * vector_from_label(eig, psi, q)
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_monomial_images_have_full_rank(self, instance6):
        _, eig, psi = instance6
        images = np.column_stack(
            [vector_from_label(eig, psi, LabelPolynomial.monomial(j)) for j in range(6)]
        )
        assert np.linalg.matrix_rank(images) == 6

    def test_annihilating_label_flagged(self, instance4):
        _, eig, psi = instance4
        # the polynomial with the whole spectrum as roots sends psi to zero
        from numpy.polynomial import polynomial as npoly

        annihilator = LabelPolynomial(npoly.polyfromroots(eig.eigenvalues))
        with pytest.raises(ZeroVectorError):
            vector_from_label(eig, psi, annihilator, normalize=True)

    def test_normalization(self, instance4):
        _, eig, psi = instance4
        out = vector_from_label(eig, psi, LabelPolynomial.monomial(2), normalize=True)
        assert abs(np.linalg.norm(out) - 1.0) <= 1e-12


class TestKrylovBasis:
    def test_two_dim_example(self):
        eig = eig_decompose(np.diag([0.0, 1.0]))
        psi = np.array([1.0, 1.0]) / np.sqrt(2)
        basis = krylov_basis(eig, psi)
        np.testing.assert_allclose(basis[:, 0], psi, atol=1e-14)
        np.testing.assert_allclose(basis[:, 1], [0.0, 1 / np.sqrt(2)], atol=1e-14)

    def test_gram_determinant_nonzero(self, instance8):
        _, eig, psi = instance8
        basis = krylov_basis(eig, psi)
        gram = basis.conj().T @ basis
        assert abs(np.linalg.det(gram)) > 0

    def test_not_orthonormal_in_general(self, instance6):
        _, eig, psi = instance6
        basis = krylov_basis(eig, psi)
        gram = basis.conj().T @ basis
        assert np.max(np.abs(gram - np.eye(6))) > 1e-3

    def test_rank_drops_with_support(self):
        eig = eig_decompose(np.diag([0.0, 1.0, 2.0, 3.0]))
        psi = (eig.eigenvectors[:, 0] + eig.eigenvectors[:, 2]) / np.sqrt(2)
        basis = krylov_basis(eig, psi, check=False)
        assert np.linalg.matrix_rank(basis) == 2

    def test_condition_failure_raises(self):
        eig = eig_decompose(np.diag([0.0, 1.0, 2.0, 3.0]))
        with pytest.raises(ConditionError):
            krylov_basis(eig, eig.eigenvectors[:, 0])


class TestCanonicalBasis:
    def test_worked_example(self):
        eig = eig_decompose(np.diag([0.0, 1.0]))
        psi = np.array([1.0, 1.0j]) / np.sqrt(2)
        cb = canonical_basis(eig, psi)
        np.testing.assert_allclose(cb.vectors[:, 0], [1.0, 0.0], atol=1e-14)
        np.testing.assert_allclose(cb.vectors[:, 1], [0.0, 1.0j], atol=1e-14)
        np.testing.assert_allclose(cb.overlaps, [1, 1] / np.sqrt(2), atol=1e-14)

    def test_components_real_positive(self, instance6):
        _, eig, psi = instance6
        cb = canonical_basis(eig, psi)
        comps = cb.vectors.conj().T @ psi
        assert np.max(np.abs(comps.imag)) <= 1e-10
        assert np.min(comps.real) > 0

    def test_orthonormal(self, instance6):
        _, eig, psi = instance6
        cb = canonical_basis(eig, psi)
        gram = cb.vectors.conj().T @ cb.vectors
        assert np.max(np.abs(gram - np.eye(6))) <= 1e-9

    def test_global_phase_covariance(self, instance6):
        _, eig, psi = instance6
        phase = np.exp(0.7j)
        cb = canonical_basis(eig, psi)
        rotated = canonical_basis(eig, phase * psi)
        np.testing.assert_allclose(rotated.vectors, phase * cb.vectors, atol=1e-10)
        np.testing.assert_allclose(rotated.overlaps, cb.overlaps, atol=1e-12)

    def test_independent_of_eigensolver_phases(self, instance6):
        _, eig, psi = instance6
        cb = canonical_basis(eig, psi)
        rng = np.random.default_rng(5)
        phases = np.exp(2j * np.pi * rng.uniform(size=6))
        rephased = type(eig)(
            eigenvalues=eig.eigenvalues,
            eigenvectors=eig.eigenvectors * phases[None, :],
            degeneracy_groups=eig.degeneracy_groups,
        )
        cb2 = canonical_basis(rephased, psi)
        np.testing.assert_allclose(cb2.vectors, cb.vectors, atol=1e-10)

    def test_unitary_equivariance(self, instance6):
        _, eig, psi = instance6
        u = random_unitary(6, 6)
        rotated_eig = eig_decompose(u @ ((eig.eigenvectors * eig.eigenvalues) @ eig.eigenvectors.conj().T) @ u.conj().T)
        cb_rotated = canonical_basis(rotated_eig, u @ psi)
        cb = canonical_basis(eig, psi)
        np.testing.assert_allclose(cb_rotated.vectors, u @ cb.vectors, atol=1e-9)

    def test_time_covariance(self, instance6):
        _, eig, psi = instance6
        cb0 = canonical_basis(eig, psi)
        for t in (0.5, 1.9, 3.3):
            u_t = evolution_operator(eig, t)
            cb_t = canonical_basis(eig, evolve(eig, psi, t))
            np.testing.assert_allclose(cb_t.vectors, u_t @ cb0.vectors, atol=1e-9)

    def test_requires_conditions(self):
        eig = eig_decompose(np.diag([0.0, 1.0]))
        with pytest.raises(ConditionError):
            canonical_basis(eig, np.array([1.0, 0.0]))


def test_label_round_trip_through_hermitian_instance():
    # end to end at N=8: label a target, follow the label back
    h = random_hermitian(8, 77)
    eig = eig_decompose(h)
    psi = random_state(8, 78)
    if not check_conditions(eig, psi).passed:
        pytest.skip("instance out of conditions")
    target = random_state(8, 79)
    label = solve_label(eig, psi, target)
    np.testing.assert_allclose(vector_from_label(eig, psi, label), target, atol=1e-7)
