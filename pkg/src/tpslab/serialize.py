"""JSON wire formats for the laboratory's values.

Matrices are row-major with entries as [re, im] pairs; states carry their
dimension; a TPS carries its shape and carrier matrix. All files UTF-8.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .labeling import LabelPolynomial
from .spectra import SumsetDecomposition
from .tps import EquivalenceVerdict, Tps

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "state_to_json",
    "state_from_json",
    "tps_to_json",
    "tps_from_json",
    "polynomial_to_json",
    "polynomial_from_json",
    "decomposition_to_json",
    "decomposition_from_json",
    "verdict_to_json",
    "save_json",
    "load_json",
]


def _pairs(values) -> list[list[float]]:
    arr = np.asarray(values, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in arr]


def _from_pairs(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim {a.ndim}")
    return {"rows": a.shape[0], "cols": a.shape[1], "entries": _pairs(a)}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = _from_pairs(obj["entries"])
    if entries.size != rows * cols:
        raise ValueError(f"matrix object claims {rows}x{cols} but has {entries.size} entries")
    return entries.reshape(rows, cols)


def state_to_json(psi: np.ndarray) -> dict:
    psi = np.asarray(psi, dtype=complex).ravel()
    return {"dim": psi.size, "amplitudes": _pairs(psi)}


def state_from_json(obj: dict) -> np.ndarray:
    amps = _from_pairs(obj["amplitudes"])
    if amps.size != int(obj["dim"]):
        raise ValueError(f"state object claims dim {obj['dim']} but has {amps.size} amplitudes")
    return amps


def tps_to_json(tps: Tps) -> dict:
    return {"dims": list(tps.dims), "T": matrix_to_json(tps.matrix)}


def tps_from_json(obj: dict) -> Tps:
    return Tps(tuple(int(d) for d in obj["dims"]), matrix_from_json(obj["T"]))


def polynomial_to_json(poly: LabelPolynomial) -> dict:
    return {"coefficients": _pairs(poly.coefficients)}


def polynomial_from_json(obj: dict) -> LabelPolynomial:
    return LabelPolynomial(_from_pairs(obj["coefficients"]))


def decomposition_to_json(dec: SumsetDecomposition) -> dict:
    return {
        "locals": [[float(x) for x in spec] for spec in dec.local_spectra],
        "offset_convention": dec.offset_convention,
    }


def decomposition_from_json(obj: dict) -> SumsetDecomposition:
    return SumsetDecomposition(
        tuple(np.asarray(spec, dtype=float) for spec in obj["locals"]),
        obj.get("offset_convention", "first-absorbs"),
    )


def verdict_to_json(verdict: EquivalenceVerdict) -> dict:
    return {
        "equivalent": verdict.equivalent,
        "permutation": list(verdict.permutation) if verdict.permutation is not None else None,
        "residual": verdict.residual,
    }


def save_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
