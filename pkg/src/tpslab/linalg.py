"""Dense complex linear algebra at desk scale.

States are 1-D complex ndarrays, operators are square complex ndarrays.
All matrix functions go through the eigendecomposition; at the dimensions
this package targets (N <= 64) that is both exact-grade and simple.
Time is dimensionless (hbar = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HermiticityError",
    "EigenSystem",
    "hermiticity_defect",
    "normalize_state",
    "eig_decompose",
    "evolve",
    "evolution_operator",
    "projection_weights",
    "random_unitary",
    "random_hermitian",
    "random_state",
    "unitarity_defect",
]

HERMITICITY_TOL = 1e-10
DEGENERACY_REL_TOL = 1e-9


class HermiticityError(ValueError):
    """Input operator is not Hermitian within tolerance."""

    def __init__(self, defect: float, tol: float):
        self.defect = defect
        self.tol = tol
        super().__init__(
            f"operator is not Hermitian: max |A - A^dagger| = {defect:.3e} > {tol:.1e}"
        )


def hermiticity_defect(a: np.ndarray) -> float:
    """Max entrywise |A - A^dagger|."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def unitarity_defect(u: np.ndarray) -> float:
    """Max entrywise |U^dagger U - I|."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def normalize_state(psi: np.ndarray) -> np.ndarray:
    """Return psi scaled to unit Euclidean norm as a 1-D complex array."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise ValueError("cannot normalize a zero or non-finite vector")
    return psi / nrm


@dataclass(frozen=True)
class EigenSystem:
    """Spectral data of a Hermitian operator.

    eigenvalues are ascending; eigenvector columns are orthonormal with a
    deterministic phase (largest-magnitude component real positive, ties by
    lowest index). degeneracy_groups partitions indices by eigenvalue within
    a relative gap tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_groups: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def overlaps(self, psi: np.ndarray) -> np.ndarray:
        """Components <omega_j|psi> of psi in the eigenbasis."""
        return self.eigenvectors.conj().T @ np.asarray(psi, dtype=complex)


def _fix_column_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-|.| entry is real positive.

    Ties broken by lowest row index, so repeated calls agree bitwise.
    """
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        i = int(np.argmax(np.abs(col)))
        pivot = col[i]
        mag = abs(pivot)
        if mag > 0.0:
            v[:, j] = col * (pivot.conjugate() / mag)
    return v


def _group_degenerate(eigenvalues: np.ndarray, rel_tol: float) -> tuple[tuple[int, ...], ...]:
    spread = float(eigenvalues[-1] - eigenvalues[0]) if eigenvalues.size else 0.0
    tol = rel_tol * spread
    groups: list[list[int]] = [[0]]
    for j in range(1, eigenvalues.size):
        if eigenvalues[j] - eigenvalues[j - 1] <= tol:
            groups[-1].append(j)
        else:
            groups.append([j])
    return tuple(tuple(g) for g in groups)


def eig_decompose(h: np.ndarray, tol: float = HERMITICITY_TOL) -> EigenSystem:
    """Eigendecompose a Hermitian operator with deterministic phases.

    Raises HermiticityError (carrying the defect) if h deviates from
    Hermiticity by more than tol.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise HermiticityError(defect, tol)
    w, v = np.linalg.eigh(h)
    v = _fix_column_phases(v)
    return EigenSystem(
        eigenvalues=w,
        eigenvectors=v,
        degeneracy_groups=_group_degenerate(w, DEGENERACY_REL_TOL),
    )


def evolve(eig: EigenSystem, psi: np.ndarray, t: float) -> np.ndarray:
    """Apply exp(-i H t) to psi through the eigendecomposition of H."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (eig.dim,):
        raise ValueError(f"state has shape {psi.shape}, operator dimension is {eig.dim}")
    coeffs = eig.overlaps(psi)
    return eig.eigenvectors @ (np.exp(-1j * eig.eigenvalues * t) * coeffs)


def evolution_operator(eig: EigenSystem, t: float) -> np.ndarray:
    """The unitary exp(-i H t) as a dense matrix."""
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.conj().T


def projection_weights(eig: EigenSystem, psi: np.ndarray) -> np.ndarray:
    """Squared projection lengths of psi onto each eigenspace.

    One weight per degeneracy group; weights sum to 1 for a unit vector.
    These are constant under time evolution generated by the same operator.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (eig.dim,):
        raise ValueError(f"state has shape {psi.shape}, operator dimension is {eig.dim}")
    mags = np.abs(eig.overlaps(psi)) ** 2
    return np.array([mags[list(g)].sum() for g in eig.degeneracy_groups])


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Sample from the rotation-invariant distribution on U(dim).

    QR of a complex Gaussian matrix with the diagonal-phase correction that
    makes the result distribution-invariant. Same seed, same matrix.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    """Gaussian-unitary-ensemble Hermitian matrix; same seed, same matrix."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_state(dim: int, seed: int) -> np.ndarray:
    """Unit vector uniform on the sphere in C^dim; same seed, same vector."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize_state(z)
