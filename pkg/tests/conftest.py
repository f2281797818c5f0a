import numpy as np
import pytest

from tpslab import check_conditions, eig_decompose, random_hermitian, random_state


def well_conditioned_instance(dim, seed, min_overlap=1e-2):
    """Seeded (H, eig, psi) with a simple spectrum and solid overlaps."""
    for attempt in range(64):
        h = random_hermitian(dim, seed + 1000 * attempt)
        eig = eig_decompose(h)
        psi = random_state(dim, seed + 1000 * attempt + 500)
        report = check_conditions(eig, psi)
        if report.passed and report.min_overlap > min_overlap:
            return h, eig, psi
    raise RuntimeError(f"no well-conditioned instance from seed {seed}")


@pytest.fixture
def instance4():
    return well_conditioned_instance(4, 11)


@pytest.fixture
def instance6():
    return well_conditioned_instance(6, 23)


@pytest.fixture
def instance8():
    return well_conditioned_instance(8, 37)


@pytest.fixture
def bell():
    return np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
