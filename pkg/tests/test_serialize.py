import json

import numpy as np
import pytest

from tpslab import (
    LabelPolynomial,
    Tps,
    are_equivalent,
    identity_tps,
    random_state,
    random_unitary,
)
from tpslab.serialize import (
    decomposition_from_json,
    decomposition_to_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    polynomial_from_json,
    polynomial_to_json,
    save_json,
    state_from_json,
    state_to_json,
    tps_from_json,
    tps_to_json,
    verdict_to_json,
)
from tpslab.spectra import SumsetDecomposition


def test_matrix_schema_and_round_trip():
    a = random_unitary(3, 1)
    obj = matrix_to_json(a)
    assert obj["rows"] == 3 and obj["cols"] == 3
    assert len(obj["entries"]) == 9
    assert all(len(pair) == 2 for pair in obj["entries"])
    # row-major: entry (0, 1) is the second pair
    assert obj["entries"][1] == [a[0, 1].real, a[0, 1].imag]
    np.testing.assert_array_equal(matrix_from_json(obj), a)


def test_matrix_entry_count_validated():
    with pytest.raises(ValueError, match="entries"):
        matrix_from_json({"rows": 2, "cols": 2, "entries": [[1.0, 0.0]]})


def test_state_schema_and_round_trip():
    psi = random_state(5, 2)
    obj = state_to_json(psi)
    assert obj["dim"] == 5 and len(obj["amplitudes"]) == 5
    np.testing.assert_array_equal(state_from_json(obj), psi)


def test_tps_round_trip():
    t = Tps((2, 3), random_unitary(6, 3))
    obj = tps_to_json(t)
    assert obj["dims"] == [2, 3]
    back = tps_from_json(obj)
    assert back.dims == (2, 3)
    np.testing.assert_array_equal(back.matrix, t.matrix)


def test_polynomial_round_trip():
    p = LabelPolynomial([1.0 + 2.0j, 0.0, 3.5])
    back = polynomial_from_json(polynomial_to_json(p))
    assert back == p


def test_decomposition_round_trip():
    dec = SumsetDecomposition((np.array([-1.0, 0.5]), np.array([0.0, 2.0])))
    obj = decomposition_to_json(dec)
    assert obj["offset_convention"] == "first-absorbs"
    back = decomposition_from_json(obj)
    np.testing.assert_allclose(back.local_spectra[0], [-1.0, 0.5])


def test_verdict_serialization_carries_residual():
    v = are_equivalent(identity_tps((2, 2)), identity_tps((2, 2)))
    obj = verdict_to_json(v)
    assert obj["equivalent"] is True
    assert obj["permutation"] == [0, 1]
    assert isinstance(obj["residual"], float)


def test_save_load_utf8(tmp_path):
    path = tmp_path / "m.json"
    save_json(matrix_to_json(np.eye(2)), path)
    text = path.read_text(encoding="utf-8")
    assert json.loads(text)["rows"] == 2
    np.testing.assert_array_equal(matrix_from_json(load_json(path)), np.eye(2))


def test_save_is_deterministic(tmp_path):
    obj = matrix_to_json(random_unitary(4, 9))
    save_json(obj, tmp_path / "a.json")
    save_json(obj, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
