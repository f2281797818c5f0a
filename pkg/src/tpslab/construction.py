"""The state-anchored TPS and the experiments it cannot survive.

`canonical_tps` turns (H, psi, shape) into a concrete TPS by loading the
canonical basis into the carrier columns: product-basis slot j (in
lexicographic order) is identified with the j-th canonical vector (in
ascending-eigenvalue order). Entropy profiles record, for a probe set of
label polynomials, the subsystem entropies of every addressed vector;
they are the invariants that pin the construction down.

The two experiments exhibit the cost of that anchoring:

- locking: rebuilding from a different input vector generically gives an
  inequivalent TPS, yet the input vector's own entropy row is pinned to
  the overlap moduli regardless of which input is used;
- time drift: rebuilding along the Schroedinger flow drags the TPS with
  the state, so the comoving entropies freeze while a fixed-TPS observer
  sees them change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .labeling import (
    ConditionError,
    LabelPolynomial,
    ZeroVectorError,
    canonical_basis,
    check_conditions,
    vector_from_label,
)
from .linalg import EigenSystem, evolution_operator, evolve
from .tps import EquivalenceVerdict, Tps, are_equivalent, entropy, transform

__all__ = [
    "EntropyProfile",
    "ProfileCheck",
    "LockingReport",
    "TrilemmaReport",
    "default_probes",
    "canonical_tps",
    "compute_profile",
    "verify_profile",
    "locking_experiment",
    "time_drift_experiment",
]


def canonical_tps(eig: EigenSystem, psi: np.ndarray, dims) -> Tps:
    """The unique TPS anchored at (H, psi) for the given shape.

    Carrier column j is the j-th canonical basis vector, so the pull-back
    of psi has real positive components equal to the eigenbasis overlap
    moduli. Deterministic: identical inputs give a bitwise-identical
    carrier. Requires the construction conditions and prod(dims) == dim.
    """
    dims = tuple(int(d) for d in dims)
    basis = canonical_basis(eig, psi)
    if int(np.prod(dims)) != eig.dim:
        raise ValueError(f"shape {dims} has size {int(np.prod(dims))}, state dimension is {eig.dim}")
    return Tps(dims, basis.vectors)


def default_probes(n_dim: int, n_random: int = 20, seed: int = 7) -> list[LabelPolynomial]:
    """Monomials 1, X, ..., X^{N-1} plus seeded random degree-(N-1) labels."""
    probes = [LabelPolynomial.monomial(j) for j in range(n_dim)]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        c = rng.standard_normal(n_dim) + 1j * rng.standard_normal(n_dim)
        probes.append(LabelPolynomial(c))
    return probes


def _dedup(probes) -> list[LabelPolynomial]:
    seen: set[bytes] = set()
    out = []
    for p in probes:
        key = p.coefficients.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


@dataclass(frozen=True)
class EntropyProfile:
    """Subsystem entropies of every probe-addressed vector.

    table[i, k] is the entropy of the normalized vector labeled by
    probes[i] in subsystem k. Probes addressing a (near) zero vector are
    skipped and recorded in skipped_probes.
    """

    probes: tuple[LabelPolynomial, ...]
    table: np.ndarray
    skipped_probes: tuple[LabelPolynomial, ...] = ()


def compute_profile(tps: Tps, eig: EigenSystem, psi: np.ndarray, probes) -> EntropyProfile:
    """Evaluate the entropy table of the probe set under one TPS."""
    kept, skipped, rows = [], [], []
    for probe in _dedup(probes):
        try:
            vec = vector_from_label(eig, psi, probe, normalize=True)
        except ZeroVectorError:
            skipped.append(probe)
            continue
        kept.append(probe)
        rows.append([entropy(tps, vec, k) for k in range(tps.n_factors)])
    table = np.array(rows) if rows else np.zeros((0, tps.n_factors))
    return EntropyProfile(tuple(kept), table, tuple(skipped))


@dataclass(frozen=True)
class ProfileCheck:
    """Max-deviation comparison of a stored profile against recomputation."""

    max_deviation: float
    tol: float
    worst_probe: int
    worst_subsystem: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def verify_profile(
    tps: Tps,
    eig: EigenSystem,
    psi: np.ndarray,
    profile: EntropyProfile,
    tol: float = 1e-10,
) -> ProfileCheck:
    """Recompute the profile's probes under tps and report the worst cell."""
    recomputed = compute_profile(tps, eig, psi, profile.probes)
    if recomputed.probes != profile.probes:
        raise ValueError("profile probes changed on recomputation (zero-vector probe?)")
    dev = np.abs(recomputed.table - profile.table)
    if dev.size == 0:
        return ProfileCheck(0.0, tol, -1, -1)
    flat = int(np.argmax(dev))
    i, k = np.unravel_index(flat, dev.shape)
    return ProfileCheck(float(dev[i, k]), tol, int(i), int(k))


@dataclass(frozen=True)
class LockingReport:
    """Two anchorings of the same (H, shape) at different input vectors.

    The input vector's own entropy row (the constant-label row) depends
    only on its overlap moduli with the eigenbasis, so both anchorings pin
    it to the same values whenever those moduli agree, even though the two
    structures are generically inequivalent.
    """

    verdict: EquivalenceVerdict
    input_entropies_first: np.ndarray
    input_entropies_second: np.ndarray
    cross_entropies_second_under_first: np.ndarray
    overlap_moduli_agree: bool
    profile_first: EntropyProfile
    profile_second: EntropyProfile


def locking_experiment(
    eig: EigenSystem,
    psi: np.ndarray,
    psi_prime: np.ndarray,
    dims,
    probes=None,
    moduli_tol: float = 1e-9,
) -> LockingReport:
    """Anchor at psi and at psi_prime, then compare the two structures."""
    probes = list(probes) if probes is not None else default_probes(eig.dim)
    tau_1 = canonical_tps(eig, psi, dims)
    tau_2 = canonical_tps(eig, psi_prime, dims)
    n = len(tau_1.dims)
    moduli_gap = np.max(
        np.abs(np.abs(eig.overlaps(psi)) - np.abs(eig.overlaps(psi_prime)))
    )
    return LockingReport(
        verdict=are_equivalent(tau_1, tau_2),
        input_entropies_first=np.array([entropy(tau_1, psi, k) for k in range(n)]),
        input_entropies_second=np.array([entropy(tau_2, psi_prime, k) for k in range(n)]),
        cross_entropies_second_under_first=np.array(
            [entropy(tau_1, psi_prime, k) for k in range(n)]
        ),
        overlap_moduli_agree=bool(moduli_gap <= moduli_tol),
        profile_first=compute_profile(tau_1, eig, psi, probes),
        profile_second=compute_profile(tau_2, eig, psi_prime, probes),
    )


@dataclass(frozen=True)
class TrilemmaReport:
    """Numbers behind the invariance / uniqueness / relevance trade-off.

    entropies_comoving[i, k]: entropy of psi(t_i) under the TPS rebuilt at
    t_i (frozen in i up to roundoff). entropies_fixed[i, k]: entropy of
    psi(t_i) under the t_0 structure (generically drifting).
    pairwise_verdicts: equivalence of the rebuilt structures across times.
    covariance_residuals[i]: residual of the identity "rebuilt at t_i ==
    time-evolved rebuild of t_0".
    """

    time_grid: np.ndarray
    entropies_comoving: np.ndarray
    entropies_fixed: np.ndarray
    pairwise_verdicts: tuple[tuple[int, int, EquivalenceVerdict], ...]
    covariance_residuals: np.ndarray
    probe_spread_comoving: np.ndarray | None = None
    probe_spread_fixed: np.ndarray | None = None
    locking: LockingReport | None = None


def time_drift_experiment(
    eig: EigenSystem,
    psi0: np.ndarray,
    dims,
    times,
    probes=None,
    pairwise: bool = True,
    equivalence_tol: float = 1e-7,
) -> TrilemmaReport:
    """Rebuild the anchored TPS along the flow and watch what freezes.

    The construction conditions are checked at t = 0; they then hold at
    every time because the overlap moduli are conserved by the flow.
    """
    report = check_conditions(eig, psi0)
    if not report.passed:
        raise ConditionError(report)
    times = np.asarray(times, dtype=float)
    dims = tuple(int(d) for d in dims)
    n = len(dims)

    taus, states = [], []
    for t in times:
        psi_t = evolve(eig, psi0, float(t))
        states.append(psi_t)
        taus.append(canonical_tps(eig, psi_t, dims))
    tau_0 = taus[0]

    comoving = np.array(
        [[entropy(taus[i], states[i], k) for k in range(n)] for i in range(len(times))]
    )
    fixed = np.array(
        [[entropy(tau_0, states[i], k) for k in range(n)] for i in range(len(times))]
    )
    covariance = np.array(
        [
            are_equivalent(
                transform(tau_0, evolution_operator(eig, float(t) - float(times[0]))),
                taus[i],
                tol=equivalence_tol,
            ).residual
            for i, t in enumerate(times)
        ]
    )
    verdicts = []
    if pairwise:
        for i in range(len(times)):
            for j in range(i + 1, len(times)):
                verdicts.append((i, j, are_equivalent(taus[i], taus[j], tol=equivalence_tol)))

    spread_comoving = spread_fixed = None
    if probes is not None:
        probes = _dedup(probes)
        per_time_comoving = [
            compute_profile(taus[i], eig, states[i], probes).table for i in range(len(times))
        ]
        per_time_fixed = [
            compute_profile(tau_0, eig, states[i], probes).table for i in range(len(times))
        ]
        spread_comoving = np.ptp(np.stack(per_time_comoving), axis=0)
        spread_fixed = np.ptp(np.stack(per_time_fixed), axis=0)

    return TrilemmaReport(
        time_grid=times,
        entropies_comoving=comoving,
        entropies_fixed=fixed,
        pairwise_verdicts=tuple(verdicts),
        covariance_residuals=covariance,
        probe_spread_comoving=spread_comoving,
        probe_spread_fixed=spread_fixed,
    )
