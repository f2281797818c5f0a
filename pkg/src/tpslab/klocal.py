"""Locality of a Hamiltonian as a property of the TPS.

A qubit Hamiltonian pulled back through a TPS carrier decomposes over
tensor words of Pauli matrices; the squared coefficient mass on words
touching more than k factors is the k-nonlocality cost. The cost is zero
exactly when the Hamiltonian is k-local in that TPS, and it is invariant
under the TPS's own stabilizer, so it is a function of the structure,
not of the carrier. `search_klocal_tps` minimizes it over carriers by
seeded random-restart proposal descent.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .linalg import HermiticityError, hermiticity_defect, random_unitary
from .tps import Tps, kron_all

__all__ = [
    "PauliDecomposition",
    "KLocalSearchResult",
    "pauli_word_weight",
    "pauli_coefficients",
    "nonlocality_cost",
    "search_klocal_tps",
]

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_word_weight(word: str) -> int:
    """Number of non-identity letters in a Pauli word."""
    return sum(ch != "I" for ch in word)


@lru_cache(maxsize=8)
def _pauli_basis(n_qubits: int):
    """Labels, stacked word matrices, projection rows, and word weights."""
    labels = ["".join(w) for w in product("IXYZ", repeat=n_qubits)]
    mats = np.stack([kron_all([_PAULI[ch] for ch in w]) for w in labels])
    proj = mats.transpose(0, 2, 1).reshape(len(labels), -1)
    weights = np.array([pauli_word_weight(w) for w in labels])
    return tuple(labels), mats, proj, weights


def _require_qubits(tps: Tps) -> int:
    if any(d != 2 for d in tps.dims):
        raise ValueError(f"Pauli decomposition needs an all-qubit shape, got {tps.dims}")
    return tps.n_factors


@dataclass(frozen=True)
class PauliDecomposition:
    """Real Pauli-word coefficients of a pulled-back Hamiltonian."""

    n_qubits: int
    terms: dict[str, float]

    def to_matrix(self) -> np.ndarray:
        labels, mats, _, _ = _pauli_basis(self.n_qubits)
        index = {w: i for i, w in enumerate(labels)}
        out = np.zeros((2**self.n_qubits,) * 2, dtype=complex)
        for word, coeff in self.terms.items():
            out += coeff * mats[index[word]]
        return out

    def weight_mass(self, above: int) -> float:
        """Sum of squared coefficients on words of weight above the cutoff."""
        return sum(c * c for w, c in self.terms.items() if pauli_word_weight(w) > above)


def _coefficient_vector(h_pulled: np.ndarray, proj: np.ndarray, n_qubits: int) -> np.ndarray:
    return (proj @ h_pulled.ravel()).real / 2**n_qubits


def pauli_coefficients(h: np.ndarray, tps: Tps, drop_below: float = 1e-14) -> PauliDecomposition:
    """Coefficients c_w = 2^{-n} tr(W_w H_pulled) for every Pauli word.

    Real for Hermitian input; words with |c_w| below drop_below are
    omitted from the table.
    """
    n_qubits = _require_qubits(tps)
    h = np.asarray(h, dtype=complex)
    defect = hermiticity_defect(h)
    if defect > 1e-10:
        raise HermiticityError(defect, 1e-10)
    labels, _, proj, _ = _pauli_basis(n_qubits)
    hp = tps.matrix.conj().T @ h @ tps.matrix
    raw = proj @ hp.ravel() / 2**n_qubits
    if np.max(np.abs(raw.imag)) > 1e-10:
        raise ValueError("Pauli coefficients of a Hermitian operator should be real")
    coeffs = raw.real
    terms = {w: float(c) for w, c in zip(labels, coeffs) if abs(c) > drop_below}
    return PauliDecomposition(n_qubits, terms)


def nonlocality_cost(h: np.ndarray, tps: Tps, k: int) -> float:
    """Squared coefficient mass on Pauli words coupling more than k factors."""
    n_qubits = _require_qubits(tps)
    _, _, proj, weights = _pauli_basis(n_qubits)
    hp = tps.matrix.conj().T @ np.asarray(h, dtype=complex) @ tps.matrix
    coeffs = _coefficient_vector(hp, proj, n_qubits)
    return float((coeffs[weights > k] ** 2).sum())


@dataclass(frozen=True)
class KLocalSearchResult:
    """Best carrier found, its cost, the winning restart's cost trace, and
    the seed that produced it. restart_costs maps every seed to its final
    cost for non-uniqueness scans."""

    best_tps: Tps
    cost: float
    trace: np.ndarray
    seed: int
    restart_costs: tuple[tuple[int, float], ...]


def _expm_antihermitian(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(-1j * a)
    return (v * np.exp(1j * w)) @ v.conj().T


def _orthonormalize(u: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(u)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _descent(h, n_total, proj, mask, seed, iters, start, step0, stop_cost):
    rng = np.random.default_rng(seed)
    scale = 1.0 / (n_total * n_total)  # the squared 2^-n of the coefficient formula

    def cost_at(carrier):
        hp = carrier.conj().T @ h @ carrier
        return float(((proj @ hp.ravel()).real[mask] ** 2).sum()) * scale

    t = start
    cost = cost_at(t)
    trace = [cost]
    step = step0
    for _ in range(iters):
        if stop_cost is not None and cost < stop_cost:
            break
        g = rng.standard_normal((n_total, n_total)) + 1j * rng.standard_normal(
            (n_total, n_total)
        )
        direction = g - g.conj().T
        direction /= np.linalg.norm(direction)
        w, v = np.linalg.eigh(-1j * direction)

        def move_by(amount):
            return t @ ((v * np.exp(1j * amount * w)) @ v.conj().T)

        c_plus = cost_at(move_by(step))
        c_minus = cost_at(move_by(-step))
        best_amount, best_cost = 0.0, cost
        if c_plus < best_cost:
            best_amount, best_cost = step, c_plus
        if c_minus < best_cost:
            best_amount, best_cost = -step, c_minus
        # quadratic fit through the three samples sharpens the tail
        curvature = c_plus + c_minus - 2 * cost
        if curvature > 0:
            vertex = 0.5 * step * (c_minus - c_plus) / curvature
            if abs(vertex) > 1e-14:
                vertex = float(np.clip(vertex, -4 * step, 4 * step))
                c_vertex = cost_at(move_by(vertex))
                if c_vertex < best_cost:
                    best_amount, best_cost = vertex, c_vertex
        if best_cost < cost:
            t = move_by(best_amount)
            cost = best_cost
            step = min(max(step, abs(best_amount)) * 1.2, 0.8)
        else:
            step = max(step * 0.8, 1e-10)
        trace.append(cost)
    return t, cost, np.array(trace)


def search_klocal_tps(
    h: np.ndarray,
    k: int,
    dims,
    seeds,
    iters: int = 2000,
    *,
    initial: np.ndarray | None = None,
    step0: float = 0.2,
    stop_cost: float | None = 1e-7,
) -> KLocalSearchResult:
    """Seeded random-restart descent of the k-nonlocality cost.

    Each restart proposes carrier updates T -> T exp(A) with A a random
    anti-Hermitian step whose size adapts downward while proposals are
    rejected, accepting only cost decreases, so the recorded trace never
    increases. The first restart starts at `initial` (identity when not
    given); later restarts start at seeded random unitaries. The winner
    is the lowest final cost, ties broken by lowest seed. Non-convergence
    is a result, not an error.
    """
    dims = tuple(int(d) for d in dims)
    if any(d != 2 for d in dims):
        raise ValueError(f"search needs an all-qubit shape, got {dims}")
    n_total = math.prod(dims)
    if n_total > 16:
        raise ValueError("search is limited to at most four qubits")
    h = np.asarray(h, dtype=complex)
    n_qubits = len(dims)
    _, _, proj, weights = _pauli_basis(n_qubits)
    mask = weights > k
    start0 = np.eye(n_total, dtype=complex) if initial is None else np.asarray(initial, complex)

    seeds = [int(s) for s in seeds]
    n_workers = max(1, int(os.environ.get("TPSLAB_THREADS", "1")))

    def run_one(position_seed):
        position, seed = position_seed
        start = start0 if position == 0 else random_unitary(n_total, seed)
        return _descent(h, n_total, proj, mask, seed, iters, start, step0, stop_cost)

    results: list[tuple[np.ndarray, float, np.ndarray]] = []
    jobs = list(enumerate(seeds))
    if n_workers == 1:
        for job in jobs:
            results.append(run_one(job))
            if stop_cost is not None and results[-1][1] < stop_cost:
                break
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for wave_start in range(0, len(jobs), n_workers):
                wave = jobs[wave_start : wave_start + n_workers]
                results.extend(pool.map(run_one, wave))
                if stop_cost is not None and any(r[1] < stop_cost for r in results):
                    break

    best_i = min(range(len(results)), key=lambda i: (results[i][1], seeds[i]))
    t_best, _, trace = results[best_i]
    t_best = _orthonormalize(t_best)
    best_tps = Tps(dims, t_best)
    final_cost = nonlocality_cost(h, best_tps, k)
    return KLocalSearchResult(
        best_tps=best_tps,
        cost=final_cost,
        trace=trace,
        seed=seeds[best_i],
        restart_costs=tuple((seeds[i], float(r[1])) for i, r in enumerate(results)),
    )
