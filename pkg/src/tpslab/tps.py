"""Tensor product structures as values.

A TPS on an N-dimensional space is carried by a unitary T mapping the
lexicographic product basis of C^{d_1} x ... x C^{d_n} into the space.
Two carriers define the same TPS when they differ by per-factor unitaries
and a permutation of equal-dimension factors; `are_equivalent` decides
this by iterated bipartite operator-Schmidt factorization.

Flattening convention (shared by every module): multi-index (i_1,...,i_n)
maps to the flat index sum_k i_k * prod_{m>k} d_m, i.e. numpy C order.
Subsystem indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .linalg import EigenSystem, unitarity_defect

__all__ = [
    "Tps",
    "EquivalenceVerdict",
    "DiscriminatingSearchError",
    "identity_tps",
    "pull_back",
    "reduced_density",
    "entropy",
    "is_product_state",
    "are_equivalent",
    "transform",
    "tps_manifold_dim",
    "stab_tps_dim",
    "stab_h_dim",
    "permutation_operator",
    "kron_all",
    "find_discriminating_state",
]

UNITARITY_TOL = 1e-9
EQUIVALENCE_TOL = 1e-7


def kron_all(mats: list[np.ndarray] | tuple[np.ndarray, ...]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True)
class Tps:
    """Subsystem shape plus the unitary carrier T.

    dims: factor dimensions (d_1, ..., d_n), each >= 2.
    matrix: N x N unitary, N = prod(dims), columns indexed by the
    lexicographic product basis.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError(f"every factor dimension must be >= 2, got {dims}")
        n_total = math.prod(dims)
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (n_total, n_total):
            raise ValueError(f"carrier shape {m.shape} does not match prod(dims) = {n_total}")
        defect = unitarity_defect(m)
        if defect > UNITARITY_TOL:
            raise ValueError(f"carrier is not unitary: defect {defect:.3e} > {UNITARITY_TOL:.1e}")

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of the local-unitary membership decision.

    When equivalent, the witness satisfies
    T1^-1 T2 = P_perm (U_1 x ... x U_n) up to `residual` in max norm.
    When inequivalent, residual is the smallest relative second
    operator-Schmidt singular value met across candidate permutations,
    a proxy for the distance to the local-unitary group.
    """

    equivalent: bool
    permutation: tuple[int, ...] | None
    local_unitaries: tuple[np.ndarray, ...] | None
    residual: float


class DiscriminatingSearchError(RuntimeError):
    """Search budget exhausted; carries the best candidate found."""

    def __init__(self, budget: int, best_state: np.ndarray | None, best_entropy: float):
        self.budget = budget
        self.best_state = best_state
        self.best_entropy = best_entropy
        super().__init__(
            f"no discriminating state within {budget} candidates "
            f"(best second-structure entropy {best_entropy:.3e}); "
            "the structures may be near-equivalent or tolerances misconfigured"
        )


def identity_tps(dims) -> Tps:
    n_total = math.prod(dims)
    return Tps(tuple(dims), np.eye(n_total, dtype=complex))


def transform(tps: Tps, u: np.ndarray) -> Tps:
    """Compose the carrier with a global unitary: T -> U T, same shape."""
    u = np.asarray(u, dtype=complex)
    defect = unitarity_defect(u)
    if defect > UNITARITY_TOL:
        raise ValueError(f"transform requires a unitary: defect {defect:.3e}")
    return Tps(tps.dims, u @ tps.matrix)


def pull_back(tps: Tps, psi: np.ndarray) -> np.ndarray:
    """T^-1 psi, reshaped to the multi-index tensor (d_1, ..., d_n)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (tps.size,):
        raise ValueError(f"state has shape {psi.shape}, structure dimension is {tps.size}")
    return (tps.matrix.conj().T @ psi).reshape(tps.dims)


def reduced_density(tps: Tps, psi: np.ndarray, k: int) -> np.ndarray:
    """Reduced density operator of subsystem k (0-based): d_k x d_k, PSD, trace 1."""
    if not 0 <= k < tps.n_factors:
        raise IndexError(f"subsystem index {k} out of range for {tps.n_factors} factors")
    theta = pull_back(tps, psi)
    a = np.moveaxis(theta, k, 0).reshape(tps.dims[k], -1)
    return a @ a.conj().T


def entropy(tps: Tps, psi: np.ndarray, k: int) -> float:
    """Von Neumann entropy (natural log) of subsystem k, clamped to [0, ln d_k].

    Eigenvalues below zero from roundoff are clamped before the logarithm,
    with 0 ln 0 = 0.
    """
    rho = reduced_density(tps, psi, k)
    lam = np.linalg.eigvalsh(rho)
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam > 0.0]
    s = float(-(lam * np.log(lam)).sum())
    return min(max(s, 0.0), math.log(tps.dims[k]))


def is_product_state(tps: Tps, psi: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff every subsystem entropy is below tol."""
    return all(entropy(tps, psi, k) < tol for k in range(tps.n_factors))


def permutation_operator(dims, perm) -> np.ndarray:
    """Unitary sending factor k of the product space to slot perm[k].

    Only dimension-preserving permutations (dims[perm[k]] == dims[k]) keep
    the slot dimensions intact.
    """
    dims = tuple(dims)
    perm = tuple(perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"not a permutation of {len(dims)} slots: {perm}")
    if any(dims[perm[k]] != dims[k] for k in range(len(dims))):
        raise ValueError("permutation does not preserve slot dimensions")
    n_total = math.prod(dims)
    source = np.moveaxis(np.arange(n_total).reshape(dims), range(len(dims)), perm).ravel()
    p = np.zeros((n_total, n_total))
    p[np.arange(n_total), source] = 1.0
    return p


def _dimension_preserving_permutations(dims):
    for perm in permutations(range(len(dims))):
        if all(dims[perm[k]] == dims[k] for k in range(len(dims))):
            yield perm


def _split_leading_factor(w: np.ndarray, d: int, tol: float):
    """Operator-Schmidt split of w across factor (dim d) vs the rest.

    Returns (factor, rest, ratio) with w = factor x rest when the second
    singular value is at most tol times the first; otherwise
    (None, None, ratio). The factor is scaled to Frobenius norm sqrt(d),
    which is unit determinant modulus for a unitary factor.
    """
    n_total = w.shape[0]
    rest_dim = n_total // d
    m = w.reshape(d, rest_dim, d, rest_dim).transpose(0, 2, 1, 3).reshape(d * d, rest_dim**2)
    u, s, vh = np.linalg.svd(m)
    ratio = float(s[1] / s[0]) if s.size > 1 and s[0] > 0 else 0.0
    if ratio > tol:
        return None, None, ratio
    factor = u[:, 0].reshape(d, d) * np.sqrt(d)
    rest = vh[0].reshape(rest_dim, rest_dim) * (s[0] / np.sqrt(d))
    return factor, rest, ratio


def _factor_local(w: np.ndarray, dims, tol: float):
    """Factor w as U_1 x ... x U_n, or report the failing ratio."""
    factors = []
    rest = w
    worst_ratio = 0.0
    for d in dims[:-1]:
        factor, rest, ratio = _split_leading_factor(rest, d, tol)
        worst_ratio = max(worst_ratio, ratio)
        if factor is None:
            return None, ratio
        factors.append(factor)
    factors.append(rest)
    return factors, worst_ratio


def are_equivalent(tps1: Tps, tps2: Tps, tol: float = EQUIVALENCE_TOL) -> EquivalenceVerdict:
    """Decide whether two carriers define the same TPS.

    Factorizes W = T1^-1 T2 composed with each dimension-preserving factor
    permutation by iterated operator-Schmidt splits; a split is accepted
    when its second singular value is at most tol times the first.
    Shapes must match as ordered tuples; permutations act only among
    factors of equal dimension.
    """
    if tps1.dims != tps2.dims:
        raise ValueError(f"shape mismatch: {tps1.dims} vs {tps2.dims}")
    dims = tps1.dims
    w = tps1.matrix.conj().T @ tps2.matrix
    if len(dims) == 1:
        return EquivalenceVerdict(True, (0,), (w,), 0.0)
    best_fail = np.inf
    for perm in _dimension_preserving_permutations(dims):
        p = permutation_operator(dims, perm)
        w_perm = p.T @ w
        factors, ratio = _factor_local(w_perm, dims, tol)
        if factors is None:
            best_fail = min(best_fail, ratio)
            continue
        assembled = kron_all(factors)
        residual = float(np.max(np.abs(w_perm - assembled)))
        if residual <= max(tol, 1e-9):
            return EquivalenceVerdict(True, perm, tuple(factors), residual)
        best_fail = min(best_fail, residual)
    return EquivalenceVerdict(False, None, None, float(best_fail))


def tps_manifold_dim(dims) -> int:
    """Dimension of the manifold of distinct TPSs with the given shape."""
    return math.prod(d * d for d in dims) - sum(d * d for d in dims) + len(dims) - 1


def stab_tps_dim(dims) -> int:
    """Dimension of the group of unitaries leaving a TPS unchanged."""
    return sum(d * d for d in dims) - len(dims) + 1


def stab_h_dim(eig: EigenSystem) -> int:
    """Dimension of the unitary stabilizer of a Hermitian operator.

    Sum of squared eigenvalue multiplicities; N for a nondegenerate
    spectrum, N^2 for a scalar operator.
    """
    return sum(len(g) ** 2 for g in eig.degeneracy_groups)


def find_discriminating_state(
    tps1: Tps,
    tps2: Tps,
    budget: int = 200,
    *,
    product_tol: float = 1e-9,
    entangled_tol: float = 1e-3,
    seed: int = 0,
) -> np.ndarray:
    """State that is product in tps1 and entangled in tps2.

    Scans the images under T1 of the product basis, then seeded random
    product states, in deterministic order. Candidates are product in
    tps1 by construction; success requires some subsystem entropy in
    tps2 of at least entangled_tol. Exists for every inequivalent pair.

    Raises ValueError if the structures are equivalent, and
    DiscriminatingSearchError (carrying the best candidate) if the budget
    runs out.
    """
    verdict = are_equivalent(tps1, tps2)
    if verdict.equivalent:
        raise ValueError("structures are equivalent; no discriminating state exists")
    rng = np.random.default_rng(seed)
    n_total = tps1.size

    def candidates():
        for j in range(min(budget, n_total)):
            yield tps1.matrix[:, j]
        for _ in range(budget - n_total):
            locals_ = []
            for d in tps1.dims:
                z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
                locals_.append(z / np.linalg.norm(z))
            prod_vec = locals_[0]
            for v in locals_[1:]:
                prod_vec = np.kron(prod_vec, v)
            yield tps1.matrix @ prod_vec

    best_state, best_entropy = None, -1.0
    for cand in candidates():
        e_first = max(entropy(tps1, cand, k) for k in range(tps1.n_factors))
        if e_first > product_tol:
            continue
        e_second = max(entropy(tps2, cand, k) for k in range(tps2.n_factors))
        if e_second >= entangled_tol:
            return cand
        if e_second > best_entropy:
            best_state, best_entropy = cand, e_second
    raise DiscriminatingSearchError(budget, best_state, best_entropy)
