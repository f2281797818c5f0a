"""Seeded invariant suite behind `tpslab check`.

Each check exercises one documented invariant on fresh seeded instances
and returns a short numeric detail, so a regression names the quantity
that moved. The whole suite is budgeted well under two minutes.
"""

from __future__ import annotations

import math

import numpy as np

from . import construction, klocal, labeling, linalg, spectra
from . import tps as tps_mod


def _check_evolve_norm(seed):
    worst = 0.0
    for i in range(20):
        h = linalg.random_hermitian(8, seed + i)
        eig = linalg.eig_decompose(h)
        psi = linalg.random_state(8, seed + 100 + i)
        t = 10.0 * (i + 1) / 20
        worst = max(worst, abs(np.linalg.norm(linalg.evolve(eig, psi, t)) - 1.0))
    assert worst <= 1e-12, f"norm drift {worst:.3e}"
    return f"max norm drift {worst:.2e}"


def _check_evolve_group_law(seed):
    worst = 0.0
    for i in range(20):
        h = linalg.random_hermitian(6, seed + i)
        eig = linalg.eig_decompose(h)
        psi = linalg.random_state(6, seed + 200 + i)
        t1, t2 = 0.3 * i, 1.7 - 0.1 * i
        stepped = linalg.evolve(eig, linalg.evolve(eig, psi, t1), t2)
        direct = linalg.evolve(eig, psi, t1 + t2)
        worst = max(worst, float(np.max(np.abs(stepped - direct))))
    assert worst <= 1e-9, f"group-law gap {worst:.3e}"
    return f"max group-law gap {worst:.2e}"


def _check_projection_weights_invariance(seed):
    worst = 0.0
    for i in range(5):
        h = linalg.random_hermitian(8, seed + i)
        eig = linalg.eig_decompose(h)
        psi = linalg.random_state(8, seed + 300 + i)
        base = linalg.projection_weights(eig, psi)
        for j in range(20):
            moved = linalg.projection_weights(eig, linalg.evolve(eig, psi, 0.37 * (j + 1)))
            worst = max(worst, float(np.max(np.abs(moved - base))))
    assert worst <= 1e-10, f"weight drift {worst:.3e}"
    return f"max weight drift {worst:.2e}"


def _check_eigen_round_trip(seed):
    worst = 0.0
    for i in range(20):
        h = linalg.random_hermitian(8, seed + i)
        eig = linalg.eig_decompose(h)
        rebuilt = (eig.eigenvectors * eig.eigenvalues) @ eig.eigenvectors.conj().T
        gap = float(np.max(np.abs(rebuilt - h))) / float(np.max(np.abs(h)))
        worst = max(worst, gap)
    assert worst <= 1e-8, f"round-trip gap {worst:.3e}"
    return f"max relative round-trip gap {worst:.2e}"


def _check_random_generators(seed):
    u = linalg.random_unitary(6, seed)
    h = linalg.random_hermitian(6, seed)
    psi = linalg.random_state(6, seed)
    du = linalg.unitarity_defect(u)
    dh = linalg.hermiticity_defect(h)
    dn = abs(np.linalg.norm(psi) - 1.0)
    assert du <= 1e-10 and dh <= 1e-14 and dn <= 1e-12
    return f"unitarity {du:.2e}, hermiticity {dh:.2e}, norm {dn:.2e}"


def _check_entropy_range(seed):
    worst_low, worst_high = 0.0, 0.0
    for dims in ((2, 2), (2, 3), (2, 2, 2)):
        n_total = math.prod(dims)
        structure = tps_mod.Tps(dims, linalg.random_unitary(n_total, seed))
        for i in range(20):
            psi = linalg.random_state(n_total, seed + i)
            for k in range(len(dims)):
                s = tps_mod.entropy(structure, psi, k)
                worst_low = min(worst_low, s)
                worst_high = max(worst_high, s - math.log(dims[k]))
    assert worst_low >= 0.0 and worst_high <= 1e-12
    return f"min {worst_low:.2e}, max excess {worst_high:.2e}"


def _check_entropy_local_unitary_invariance(seed):
    worst = 0.0
    dims = (2, 3)
    structure = tps_mod.Tps(dims, linalg.random_unitary(6, seed))
    for i in range(20):
        locals_ = [linalg.random_unitary(d, seed + 10 * i + j) for j, d in enumerate(dims)]
        dressed = tps_mod.Tps(dims, structure.matrix @ tps_mod.kron_all(locals_))
        psi = linalg.random_state(6, seed + 500 + i)
        for k in range(len(dims)):
            worst = max(
                worst, abs(tps_mod.entropy(structure, psi, k) - tps_mod.entropy(dressed, psi, k))
            )
    assert worst <= 1e-10, f"entropy shift {worst:.3e}"
    return f"max entropy shift {worst:.2e}"


def _check_equivalence_relation(seed):
    dims = (2, 2, 2)
    base = tps_mod.Tps(dims, linalg.random_unitary(8, seed))
    dress = lambda t, s: tps_mod.Tps(  # noqa: E731
        dims,
        t.matrix
        @ tps_mod.kron_all([linalg.random_unitary(2, s + j) for j in range(3)]),
    )
    second = dress(base, seed + 40)
    third = dress(second, seed + 80)
    assert tps_mod.are_equivalent(base, base).equivalent, "not reflexive"
    assert tps_mod.are_equivalent(second, base).equivalent, "not symmetric"
    assert tps_mod.are_equivalent(base, third).equivalent, "not transitive"
    other = tps_mod.Tps(dims, linalg.random_unitary(8, seed + 1))
    assert not tps_mod.are_equivalent(base, other).equivalent, "random pair judged equivalent"
    return "reflexive, symmetric, transitive; random pair distinguished"


def _check_discriminating_states(seed):
    for trial, dims in enumerate(((2, 2), (2, 3), (2, 2, 2))):
        n_total = math.prod(dims)
        t1 = tps_mod.Tps(dims, linalg.random_unitary(n_total, seed + trial))
        t2 = tps_mod.Tps(dims, linalg.random_unitary(n_total, seed + trial + 50))
        state = tps_mod.find_discriminating_state(t1, t2, seed=seed)
        e1 = max(tps_mod.entropy(t1, state, k) for k in range(len(dims)))
        e2 = max(tps_mod.entropy(t2, state, k) for k in range(len(dims)))
        assert e1 <= 1e-9 and e2 >= 1e-3, f"{dims}: {e1:.2e}, {e2:.2e}"
    return "found at N = 4, 6, 8"


def _check_stabilizer_dims(seed):
    h = linalg.random_hermitian(5, seed)
    eig = linalg.eig_decompose(h)
    assert tps_mod.stab_h_dim(eig) == 5, "nondegenerate should give N"
    eye = linalg.eig_decompose(np.eye(5, dtype=complex))
    assert tps_mod.stab_h_dim(eye) == 25, "scalar should give N^2"
    return "N for simple spectrum, N^2 for scalar"


def _check_label_linearity(seed):
    rng = np.random.default_rng(seed)
    h = linalg.random_hermitian(6, seed)
    eig = linalg.eig_decompose(h)
    psi = linalg.random_state(6, seed + 1)
    worst = 0.0
    for _ in range(100):
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        p = labeling.LabelPolynomial(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        q = labeling.LabelPolynomial(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        combo = labeling.LabelPolynomial(a * p.coefficients + b * q.coefficients)
        lhs = labeling.vector_from_label(eig, psi, combo)
        rhs = a * labeling.vector_from_label(eig, psi, p) + b * labeling.vector_from_label(
            eig, psi, q
        )
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert worst <= 1e-10, f"linearity gap {worst:.3e}"
    return f"max linearity gap {worst:.2e}"


def _check_label_round_trip(seed):
    worst = 0.0
    for dim in (4, 6, 8):
        h = linalg.random_hermitian(dim, seed + dim)
        eig = linalg.eig_decompose(h)
        psi = linalg.random_state(dim, seed + 2 * dim)
        for i in range(30):
            target = linalg.random_state(dim, seed + 1000 + i)
            label = labeling.solve_label(eig, psi, target)
            back = labeling.vector_from_label(eig, psi, label)
            worst = max(worst, float(np.linalg.norm(back - target)))
    assert worst <= 1e-7, f"round-trip error {worst:.3e}"
    return f"max round-trip error {worst:.2e}"


def _check_canonical_equivariance(seed):
    worst = 0.0
    for i in range(10):
        h = linalg.random_hermitian(6, seed + i)
        eig = linalg.eig_decompose(h)
        psi = linalg.random_state(6, seed + 600 + i)
        basis = labeling.canonical_basis(eig, psi).vectors
        u = linalg.random_unitary(6, seed + 700 + i)
        rotated = labeling.canonical_basis(
            linalg.eig_decompose(u @ h @ u.conj().T), u @ psi
        ).vectors
        worst = max(worst, float(np.max(np.abs(rotated - u @ basis))))
    assert worst <= 1e-9, f"equivariance gap {worst:.3e}"
    return f"max equivariance gap {worst:.2e}"


def _check_canonical_time_covariance(seed):
    worst = 0.0
    h = linalg.random_hermitian(6, seed)
    eig = linalg.eig_decompose(h)
    psi = linalg.random_state(6, seed + 1)
    basis0 = labeling.canonical_basis(eig, psi).vectors
    for t in np.linspace(0.0, 4.0, 9):
        u_t = linalg.evolution_operator(eig, float(t))
        moved = labeling.canonical_basis(eig, linalg.evolve(eig, psi, float(t))).vectors
        worst = max(worst, float(np.max(np.abs(moved - u_t @ basis0))))
    assert worst <= 1e-9, f"covariance gap {worst:.3e}"
    return f"max covariance gap {worst:.2e}"


def _check_krylov_rank(seed):
    for dim in (4, 6, 8):
        h = linalg.random_hermitian(dim, seed + dim)
        eig = linalg.eig_decompose(h)
        psi = linalg.random_state(dim, seed + 3 * dim)
        basis = labeling.krylov_basis(eig, psi)
        rank = np.linalg.matrix_rank(basis)
        assert rank == dim, f"rank {rank} at dim {dim}"
    return "full rank at N = 4, 6, 8"


def _check_frozen_entropies(seed):
    h = linalg.random_hermitian(4, seed)
    eig = linalg.eig_decompose(h)
    psi = linalg.random_state(4, seed + 1)
    rep = construction.time_drift_experiment(
        eig, psi, (2, 2), np.linspace(0.0, 5.0, 20), pairwise=False
    )
    spread = float(np.max(np.ptp(rep.entropies_comoving, axis=0)))
    assert spread <= 1e-9, f"comoving spread {spread:.3e}"
    return f"comoving spread {spread:.2e}"


def _check_construction_covariance(seed):
    h = linalg.random_hermitian(4, seed)
    eig = linalg.eig_decompose(h)
    psi = linalg.random_state(4, seed + 1)
    rep = construction.time_drift_experiment(
        eig, psi, (2, 2), np.linspace(0.0, 5.0, 20), pairwise=False
    )
    worst = float(np.max(rep.covariance_residuals))
    assert worst <= 1e-9, f"covariance residual {worst:.3e}"
    return f"max covariance residual {worst:.2e}"


def _check_profile_self_consistency(seed):
    h = linalg.random_hermitian(6, seed)
    eig = linalg.eig_decompose(h)
    psi = linalg.random_state(6, seed + 1)
    structure = construction.canonical_tps(eig, psi, (2, 3))
    probes = construction.default_probes(6, seed=seed)
    profile = construction.compute_profile(structure, eig, psi, probes)
    check = construction.verify_profile(structure, eig, psi, profile, tol=1e-10)
    assert check.passed, f"self deviation {check.max_deviation:.3e}"
    return f"self deviation {check.max_deviation:.2e}"


def _check_profile_uniqueness(seed):
    h = linalg.random_hermitian(4, seed)
    eig = linalg.eig_decompose(h)
    psi = linalg.random_state(4, seed + 1)
    anchor = construction.canonical_tps(eig, psi, (2, 2))
    probes = construction.default_probes(4, seed=seed)
    vectors = [labeling.vector_from_label(eig, psi, p, normalize=True) for p in probes]
    baseline = np.array(
        [[tps_mod.entropy(anchor, v, k) for k in range(2)] for v in vectors]
    )
    for i in range(1000):
        candidate = tps_mod.Tps((2, 2), linalg.random_unitary(4, seed + 10 + i))
        matches = True
        for v, row in zip(vectors, baseline):
            for k in range(2):
                if abs(tps_mod.entropy(candidate, v, k) - row[k]) > 1e-3:
                    matches = False
                    break
            if not matches:
                break
        if matches and not tps_mod.are_equivalent(candidate, anchor).equivalent:
            raise AssertionError(f"inequivalent structure matched the profile (candidate {i})")
    return "no inequivalent profile match in 1000 candidates"


def _check_sumset_round_trip(seed):
    worst = 0.0
    for i, dims in enumerate(((2, 2), (2, 3), (2, 2, 2))):
        rng = np.random.default_rng(seed + i)
        local_spectra = [np.sort(rng.standard_normal(d)) * 2 for d in dims]
        h = spectra.kronecker_sum([np.diag(s).astype(complex) for s in local_spectra])
        w = np.sort(np.linalg.eigvalsh(h))
        dec = spectra.sumset_decompose(w, dims)
        assert dec is not None, f"round trip failed for {dims}"
        worst = max(worst, float(np.max(np.abs(dec.cross_sums() - w))))
    assert worst <= 1e-9, f"cross-sum mismatch {worst:.3e}"
    return f"max cross-sum mismatch {worst:.2e}"


def _check_sumset_generic_rejection(seed):
    rng = np.random.default_rng(seed)
    for dims in ((2, 2), (2, 3), (2, 2, 2)):
        n_total = math.prod(dims)
        for _ in range(10):
            w = np.sort(rng.standard_normal(n_total))
            assert spectra.sumset_decompose(w, dims) is None, f"accepted noise for {dims}"
    return "30 random spectra rejected"


def _check_interaction_consistency(seed):
    dims = (2, 2)
    h = spectra.kronecker_sum(
        [linalg.random_hermitian(2, seed), linalg.random_hermitian(2, seed + 1)]
    )
    u = linalg.random_unitary(4, seed + 2)
    scrambled = u @ h @ u.conj().T
    moved = tps_mod.transform(tps_mod.identity_tps(dims), u)
    chk = spectra.is_interaction_free(scrambled, moved)
    assert chk.interaction_free, f"residual {chk.residual:.3e}"
    z = np.diag([1.0, -1.0]).astype(complex)
    bad = spectra.is_interaction_free(np.kron(z, z), tps_mod.identity_tps(dims))
    assert not bad.interaction_free
    dec = spectra.sumset_decompose(np.sort(np.linalg.eigvalsh(scrambled)), dims)
    assert dec is not None, "spectrum of a Kronecker sum must decompose"
    return "free cases accepted, interacting case rejected, spectra agree"


def _check_parseval(seed):
    worst = 0.0
    for i in range(5):
        h = linalg.random_hermitian(8, seed + i)
        structure = tps_mod.Tps((2, 2, 2), linalg.random_unitary(8, seed + 100 + i))
        dec = klocal.pauli_coefficients(h, structure, drop_below=0.0)
        total = sum(c * c for c in dec.terms.values())
        target = float(np.trace(h @ h).real) / 8
        worst = max(worst, abs(total - target))
    assert worst <= 1e-9, f"Parseval gap {worst:.3e}"
    return f"max Parseval gap {worst:.2e}"


def _check_cost_stabilizer_invariance(seed):
    h = linalg.random_hermitian(8, seed)
    structure = tps_mod.Tps((2, 2, 2), linalg.random_unitary(8, seed + 1))
    base = klocal.nonlocality_cost(h, structure, 2)
    worst = 0.0
    for i in range(10):
        locals_ = [linalg.random_unitary(2, seed + 10 * i + j) for j in range(3)]
        dressed = tps_mod.Tps((2, 2, 2), structure.matrix @ tps_mod.kron_all(locals_))
        worst = max(worst, abs(klocal.nonlocality_cost(h, dressed, 2) - base))
    assert worst <= 1e-10, f"cost shift {worst:.3e}"
    return f"max cost shift {worst:.2e}"


def _check_search_monotone(seed):
    h = linalg.random_hermitian(8, seed)
    result = klocal.search_klocal_tps(h, 2, (2, 2, 2), seeds=[seed], iters=200, stop_cost=None)
    diffs = np.diff(result.trace)
    assert np.all(diffs <= 0.0), f"trace increased by {float(diffs.max()):.3e}"
    return f"trace non-increasing over {result.trace.size} entries"


_CHECKS = [
    ("linalg.evolve_norm", _check_evolve_norm),
    ("linalg.group_law", _check_evolve_group_law),
    ("linalg.projection_weights", _check_projection_weights_invariance),
    ("linalg.eigen_round_trip", _check_eigen_round_trip),
    ("linalg.random_generators", _check_random_generators),
    ("tps.entropy_range", _check_entropy_range),
    ("tps.local_unitary_invariance", _check_entropy_local_unitary_invariance),
    ("tps.equivalence_relation", _check_equivalence_relation),
    ("tps.discriminating_states", _check_discriminating_states),
    ("tps.stabilizer_dims", _check_stabilizer_dims),
    ("labeling.linearity", _check_label_linearity),
    ("labeling.round_trip", _check_label_round_trip),
    ("labeling.equivariance", _check_canonical_equivariance),
    ("labeling.time_covariance", _check_canonical_time_covariance),
    ("labeling.krylov_rank", _check_krylov_rank),
    ("construction.frozen_entropies", _check_frozen_entropies),
    ("construction.covariance", _check_construction_covariance),
    ("construction.profile_self", _check_profile_self_consistency),
    ("construction.profile_uniqueness", _check_profile_uniqueness),
    ("spectra.round_trip", _check_sumset_round_trip),
    ("spectra.generic_rejection", _check_sumset_generic_rejection),
    ("spectra.interaction_consistency", _check_interaction_consistency),
    ("klocal.parseval", _check_parseval),
    ("klocal.cost_invariance", _check_cost_stabilizer_invariance),
    ("klocal.search_monotone", _check_search_monotone),
]


def run_all_checks(seed: int = 7) -> list[tuple[str, bool, str]]:
    """Run every invariant check; returns (name, passed, detail) rows."""
    results = []
    for name, fn in _CHECKS:
        try:
            detail = fn(seed)
            results.append((name, True, detail))
        except AssertionError as exc:
            results.append((name, False, str(exc)))
        except Exception as exc:  # a crash is also a failure, with its reason
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
    return results
