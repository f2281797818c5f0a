"""Interaction-free Hamiltonians and their spectral signature.

A Hamiltonian that is a Kronecker sum of per-factor terms generates a
product flow: no subsystem entropy ever changes. Its spectrum is exactly
the multiset of cross-sums of the local spectra, and `sumset_decompose`
inverts that relation by backtracking. Generic spectra admit no such
decomposition, which is the spectral fingerprint of interaction.

Offset gauge: shifting one local term by c and another by -c preserves
the sum, so decompositions are canonicalized with every local minimum at
zero except the first, which absorbs the global offset.
"""

from __future__ import annotations

import math
import string
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .linalg import HermiticityError, hermiticity_defect
from .tps import Tps, kron_all

__all__ = [
    "SumsetDecomposition",
    "InteractionCheck",
    "kronecker_sum",
    "sumset_decompose",
    "is_interaction_free",
]


@dataclass(frozen=True)
class SumsetDecomposition:
    """Local spectra whose cross-sums reproduce a full spectrum.

    Every list is ascending; all local minima are zero except the first,
    which carries the global offset.
    """

    local_spectra: tuple[np.ndarray, ...]
    offset_convention: str = "first-absorbs"

    def cross_sums(self) -> np.ndarray:
        """The sorted multiset of all sums, one term from each local list."""
        total = np.array([0.0])
        for spec in self.local_spectra:
            total = (total[:, None] + np.asarray(spec)[None, :]).ravel()
        return np.sort(total)


def kronecker_sum(local_terms) -> np.ndarray:
    """H_1 x I x ... + I x H_2 x ... + ... in the shared lexicographic order."""
    local_terms = [np.asarray(h, dtype=complex) for h in local_terms]
    if len(local_terms) < 2:
        raise ValueError("a Kronecker sum needs at least two local terms")
    for h in local_terms:
        defect = hermiticity_defect(h)
        if defect > 1e-10:
            raise HermiticityError(defect, 1e-10)
    dims = [h.shape[0] for h in local_terms]
    total = np.zeros((math.prod(dims), math.prod(dims)), dtype=complex)
    for k, h in enumerate(local_terms):
        factors = [np.eye(d, dtype=complex) for d in dims]
        factors[k] = h
        total += kron_all(factors)
    return total


class _ToleranceMultiset:
    """Sorted multiset of reals with removal up to an absolute tolerance."""

    def __init__(self, values, tol: float):
        self.values = sorted(float(v) for v in values)
        self.tol = tol

    def remove_near(self, x: float) -> bool:
        """Remove the element closest to x if within tol; report success."""
        vals = self.values
        i = bisect_left(vals, x)
        best, best_gap = -1, self.tol
        for j in (i - 1, i):
            if 0 <= j < len(vals) and abs(vals[j] - x) <= best_gap:
                best, best_gap = j, abs(vals[j] - x)
        if best < 0:
            return False
        vals.pop(best)
        return True

    def snapshot(self) -> list[float]:
        return list(self.values)

    def restore(self, snap: list[float]) -> None:
        self.values = snap

    def __len__(self) -> int:
        return len(self.values)

    def min(self) -> float:
        return self.values[0]


def _pair_splits(values, d_first: int, d_rest: int, tol: float):
    """Yield every split of a zero-based sorted multiset into two local
    spectra (sizes d_first, d_rest) whose cross-sums reproduce it.

    Depth-first: the smallest unexplained value is always a new element of
    one side or the other, and each tentative assignment must account for
    all its cross-sums with the elements already placed on the far side.
    """
    pool = _ToleranceMultiset(values, tol)
    if not pool.remove_near(0.0):
        return
    first: list[float] = [0.0]
    second: list[float] = [0.0]

    def descend():
        if len(pool) == 0:
            if len(first) == d_first and len(second) == d_rest:
                yield sorted(first), sorted(second)
            return
        m = pool.min()
        for side, capacity, far in ((first, d_first, second), (second, d_rest, first)):
            if len(side) >= capacity:
                continue
            snap = pool.snapshot()
            if all(pool.remove_near(m + b) for b in far):
                side.append(m)
                yield from descend()
                side.pop()
            pool.restore(snap)

    yield from descend()


def _decompose_shifted(values, dims, tol: float):
    """Yield tuples of zero-based local spectra for the given shape."""
    if len(dims) == 1:
        if len(values) == dims[0]:
            yield (sorted(values),)
        return
    d_rest = math.prod(dims[1:])
    for first, rest in _pair_splits(values, dims[0], d_rest, tol):
        for tail in _decompose_shifted(rest, dims[1:], tol):
            yield (first, *tail)


def sumset_decompose(spectrum, dims, tol: float = 1e-9) -> SumsetDecomposition | None:
    """Factor a spectrum as the cross-sum multiset of local spectra.

    Returns the first decomposition found in the deterministic search
    order, or None when no decomposition exists within tol. Absence is a
    value, not an error: it is the generic case.
    """
    spectrum = np.sort(np.asarray(spectrum, dtype=float))
    dims = tuple(int(d) for d in dims)
    if spectrum.size != math.prod(dims):
        raise ValueError(f"spectrum has {spectrum.size} values, shape {dims} needs {math.prod(dims)}")
    offset = float(spectrum[0])
    shifted = spectrum - offset
    for locals_ in _decompose_shifted(list(shifted), dims, tol):
        arrays = [np.asarray(loc) for loc in locals_]
        arrays[0] = arrays[0] + offset
        return SumsetDecomposition(tuple(arrays))
    return None


@dataclass(frozen=True)
class InteractionCheck:
    """Result of projecting a Hamiltonian onto single-factor terms."""

    interaction_free: bool
    residual: float
    threshold: float


def _single_factor_block(hp_tensor: np.ndarray, dims, k: int) -> np.ndarray:
    """Partial trace of the pulled-back operator over every factor but k."""
    letters = string.ascii_lowercase
    out_sub, in_sub = [], []
    for i in range(len(dims)):
        if i == k:
            out_sub.append("a")
            in_sub.append("b")
        else:
            out_sub.append(letters[2 + i])
            in_sub.append(letters[2 + i])
    return np.einsum("".join(out_sub) + "".join(in_sub) + "->ab", hp_tensor)


def is_interaction_free(h: np.ndarray, tps: Tps, tol: float = 1e-10) -> InteractionCheck:
    """Does h act as a Kronecker sum of per-factor terms in this TPS?

    Pulls h back through the carrier, projects (in the trace inner
    product) onto the span of single-factor terms plus the identity, and
    reports the Frobenius norm of the remainder against tol * ||h||_F.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (tps.size, tps.size):
        raise ValueError(f"operator shape {h.shape} does not match structure size {tps.size}")
    dims = tps.dims
    n_total = tps.size
    hp = tps.matrix.conj().T @ h @ tps.matrix
    hp_tensor = hp.reshape(dims + dims)

    trace_part = np.trace(hp) / n_total
    projected = trace_part * np.eye(n_total, dtype=complex)
    for k, d in enumerate(dims):
        block = _single_factor_block(hp_tensor, dims, k) / (n_total // d)
        block = block - (np.trace(block) / d) * np.eye(d)
        factors = [np.eye(dd, dtype=complex) for dd in dims]
        factors[k] = block
        projected += kron_all(factors)

    residual = float(np.linalg.norm(hp - projected))
    threshold = tol * float(np.linalg.norm(h))
    return InteractionCheck(residual <= threshold, residual, threshold)
