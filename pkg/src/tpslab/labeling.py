"""Polynomial labeling of Hilbert-space vectors and the canonical basis.

Given a nondegenerate Hermitian operator H and a reference state psi whose
eigenbasis overlaps never vanish, every vector can be addressed as
R(H) psi for a polynomial R of degree at most N-1. The same data fixes the
free phases of the eigenbasis, yielding a basis that depends on (H, psi)
alone and not on any phase convention inside the eigensolver.

Interpolation is done in Lagrange form and then expanded to monomial
coefficients; a Vandermonde solve would be needlessly ill-conditioned on
clustered spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .linalg import EigenSystem

__all__ = [
    "LabelPolynomial",
    "ConditionReport",
    "ConditionError",
    "ZeroVectorError",
    "CanonicalBasis",
    "check_conditions",
    "apply_polynomial",
    "solve_label",
    "vector_from_label",
    "krylov_basis",
    "canonical_basis",
]

GAP_TOL = 1e-9
OVERLAP_TOL = 1e-8
ZERO_VECTOR_TOL = 1e-12


@dataclass(frozen=True)
class LabelPolynomial:
    """Complex polynomial a_0 + a_1 X + ... with ascending coefficients.

    Trailing zero coefficients are trimmed at construction.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex)).ravel()
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @classmethod
    def one(cls) -> "LabelPolynomial":
        return cls(np.array([1.0 + 0.0j]))

    @classmethod
    def monomial(cls, degree: int, coefficient: complex = 1.0) -> "LabelPolynomial":
        c = np.zeros(degree + 1, dtype=complex)
        c[degree] = coefficient
        return cls(c)

    def __call__(self, x) -> np.ndarray:
        return npoly.polyval(x, self.coefficients)

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelPolynomial) and np.array_equal(
            self.coefficients, other.coefficients
        )

    def __hash__(self):
        return hash(self.coefficients.tobytes())


@dataclass(frozen=True)
class ConditionReport:
    """Diagnostics for the two construction conditions: a simple spectrum
    and nowhere-vanishing overlaps of the reference state with the
    eigenbasis."""

    min_gap: float
    min_overlap: float
    gap_tol: float
    overlap_tol: float

    @property
    def gap_ok(self) -> bool:
        return self.min_gap > self.gap_tol

    @property
    def overlap_ok(self) -> bool:
        return self.min_overlap > self.overlap_tol

    @property
    def passed(self) -> bool:
        return self.gap_ok and self.overlap_ok

    def failure_reason(self) -> str | None:
        if not self.gap_ok:
            return (
                f"degenerate spectrum: min eigenvalue gap {self.min_gap:.3e} "
                f"<= {self.gap_tol:.1e}"
            )
        if not self.overlap_ok:
            return (
                f"vanishing overlap: min |<omega_j|psi>| {self.min_overlap:.3e} "
                f"<= {self.overlap_tol:.1e}"
            )
        return None


class ConditionError(ValueError):
    """Construction attempted outside its domain of validity."""

    def __init__(self, report: ConditionReport):
        self.report = report
        super().__init__(report.failure_reason() or "conditions not met")


class ZeroVectorError(ValueError):
    """Polynomial annihilates the reference state on its full support."""


def check_conditions(
    eig: EigenSystem,
    psi: np.ndarray,
    gap_tol: float = GAP_TOL,
    overlap_tol: float = OVERLAP_TOL,
) -> ConditionReport:
    """Report the minimal spectral gap and minimal eigenbasis overlap."""
    w = eig.eigenvalues
    min_gap = float(np.min(np.diff(w))) if w.size > 1 else np.inf
    min_overlap = float(np.min(np.abs(eig.overlaps(psi))))
    return ConditionReport(min_gap, min_overlap, gap_tol, overlap_tol)


def _require_conditions(eig: EigenSystem, psi: np.ndarray) -> ConditionReport:
    report = check_conditions(eig, psi)
    if not report.passed:
        raise ConditionError(report)
    return report


def apply_polynomial(eig: EigenSystem, poly: LabelPolynomial, psi: np.ndarray) -> np.ndarray:
    """R(H) psi = sum_j R(omega_j) <omega_j|psi> |omega_j>, unnormalized."""
    coeffs = eig.overlaps(psi)
    vals = poly(eig.eigenvalues).astype(complex)
    return eig.eigenvectors @ (vals * coeffs)


def vector_from_label(
    eig: EigenSystem,
    psi: np.ndarray,
    poly: LabelPolynomial,
    normalize: bool = False,
) -> np.ndarray:
    """The vector addressed by the label poly; linear in the label.

    With normalize=True the result is scaled to unit norm, raising
    ZeroVectorError when the polynomial vanishes on the whole support.
    """
    out = apply_polynomial(eig, poly, psi)
    if not normalize:
        return out
    nrm = np.linalg.norm(out)
    if nrm < ZERO_VECTOR_TOL:
        raise ZeroVectorError(
            f"label yields a near-zero vector (norm {nrm:.3e}); it cannot be normalized"
        )
    return out / nrm


def solve_label(eig: EigenSystem, psi: np.ndarray, target: np.ndarray) -> LabelPolynomial:
    """Label of `target` relative to (H, psi).

    Interpolates R(omega_j) = <omega_j|target> / <omega_j|psi> through all
    N nodes in Lagrange form, expanded to monomial coefficients, so the
    degree is at most N-1. Requires the construction conditions.
    """
    _require_conditions(eig, psi)
    target = np.asarray(target, dtype=complex)
    nodes = eig.eigenvalues
    ratios = eig.overlaps(target) / eig.overlaps(psi)
    n = nodes.size
    coeffs = np.zeros(n, dtype=complex)
    for j in range(n):
        others = np.delete(nodes, j)
        basis_j = npoly.polyfromroots(others).astype(complex)
        denom = np.prod(nodes[j] - others) if others.size else 1.0
        coeffs += ratios[j] * basis_j / denom
    return LabelPolynomial(coeffs)


def krylov_basis(eig: EigenSystem, psi: np.ndarray, check: bool = True) -> np.ndarray:
    """Columns psi, H psi, ..., H^{N-1} psi.

    Full rank exactly when the construction conditions hold; with
    check=True their failure raises ConditionError. The columns are not
    orthonormal in general.
    """
    if check:
        _require_conditions(eig, psi)
    coeffs = eig.overlaps(psi)
    powers = eig.eigenvalues[:, None] ** np.arange(eig.dim)[None, :]
    return eig.eigenvectors @ (powers * coeffs[:, None])


@dataclass(frozen=True)
class CanonicalBasis:
    """Orthonormal basis fixed by (H, psi): column j is the j-th
    eigenvector rotated so its overlap with psi is real positive, ordered
    by ascending eigenvalue.

    vectors: N x N matrix of basis columns.
    overlaps: the positive components |<omega_j|psi>| of psi in this basis.
    """

    vectors: np.ndarray
    overlaps: np.ndarray


def canonical_basis(eig: EigenSystem, psi: np.ndarray) -> CanonicalBasis:
    """Phase-fix the eigenbasis against psi.

    b_j = (<omega_j|psi> / |<omega_j|psi>|) |omega_j>, so <b_j|psi> is real
    positive. The result does not depend on the phase convention used
    inside the eigendecomposition. Requires the construction conditions.
    """
    _require_conditions(eig, psi)
    comps = eig.overlaps(psi)
    mags = np.abs(comps)
    return CanonicalBasis(
        vectors=eig.eigenvectors * (comps / mags)[None, :],
        overlaps=mags,
    )
