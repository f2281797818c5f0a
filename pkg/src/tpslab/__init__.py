"""Desk-scale numerical laboratory for tensor product structures."""

from .construction import (
    EntropyProfile,
    LockingReport,
    ProfileCheck,
    TrilemmaReport,
    canonical_tps,
    compute_profile,
    default_probes,
    locking_experiment,
    time_drift_experiment,
    verify_profile,
)
from .klocal import (
    KLocalSearchResult,
    PauliDecomposition,
    nonlocality_cost,
    pauli_coefficients,
    pauli_word_weight,
    search_klocal_tps,
)
from .labeling import (
    CanonicalBasis,
    ConditionError,
    ConditionReport,
    LabelPolynomial,
    ZeroVectorError,
    apply_polynomial,
    canonical_basis,
    check_conditions,
    krylov_basis,
    solve_label,
    vector_from_label,
)
from .linalg import (
    EigenSystem,
    HermiticityError,
    eig_decompose,
    evolution_operator,
    evolve,
    hermiticity_defect,
    normalize_state,
    projection_weights,
    random_hermitian,
    random_state,
    random_unitary,
    unitarity_defect,
)
from .spectra import (
    InteractionCheck,
    SumsetDecomposition,
    is_interaction_free,
    kronecker_sum,
    sumset_decompose,
)
from .tps import (
    DiscriminatingSearchError,
    EquivalenceVerdict,
    Tps,
    are_equivalent,
    entropy,
    find_discriminating_state,
    identity_tps,
    is_product_state,
    kron_all,
    permutation_operator,
    pull_back,
    reduced_density,
    stab_h_dim,
    stab_tps_dim,
    tps_manifold_dim,
    transform,
)

__version__ = "0.1.0"
