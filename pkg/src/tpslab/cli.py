"""Batch front door: run experiments from config, generate instances,
run the invariant suite, re-emit report tables.

    tpslab run -c config.json [-o PREFIX] [--seed N]
    tpslab gen --kind KIND [--dims 2,2 | --dim 4] --seed 7 -o DIR
    tpslab check [--seed 7]
    tpslab report -i report.json --csv DIR

Exit codes: 0 ok, 1 experiment or invariant failure, 2 usage error.
Reports are deterministic for a fixed config and seed except the
"wall_clock_s" field; CSV tables contain no timestamps at all.
TPSLAB_THREADS caps parallelism (default 1, fully sequential).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import construction, klocal, labeling, linalg, spectra, tps as tps_mod
from .serialize import (
    decomposition_to_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    save_json,
    state_from_json,
    state_to_json,
    tps_to_json,
    verdict_to_json,
)

EXPERIMENTS = (
    "time-drift",
    "locking",
    "frozen-entropy",
    "physical-relevance",
    "sumset",
    "klocal",
    "dims-audit",
)

GEN_KINDS = ("random-H", "kronecker-H", "scrambled-klocal", "random-state")

CONVENTIONS = {
    "flattening": "row-major lexicographic: (i_1..i_n) -> sum_k i_k prod_{m>k} d_m",
    "eigenvector_phase": "largest-magnitude component real positive, ties by lowest index",
    "canonical_phase": "overlap of each basis vector with the anchor state real positive",
    "offset": "first-absorbs",
    "subsystem_indexing": "0-based",
    "hbar": 1,
}


class UsageError(Exception):
    """Bad config or arguments; the message names the offending field."""


# ---------------------------------------------------------------------------
# instance generation (shared by `gen` and by configs without an instance)

_GEN_RETRIES = 64


def _gen_random_h(dim: int, seed: int) -> np.ndarray:
    for attempt in range(_GEN_RETRIES):
        h = linalg.random_hermitian(dim, seed + 1000 * attempt)
        w = np.linalg.eigvalsh(h)
        spread = w[-1] - w[0]
        if dim == 1 or np.min(np.diff(w)) > 1e-6 * spread:
            return h
    raise UsageError(f"could not generate a nondegenerate operator of dim {dim} from seed {seed}")


def _gen_kronecker_h(dims, seed: int):
    for attempt in range(_GEN_RETRIES):
        local_terms = [
            linalg.random_hermitian(d, seed + 1000 * attempt + 31 * k)
            for k, d in enumerate(dims)
        ]
        h = spectra.kronecker_sum(local_terms)
        w = np.linalg.eigvalsh(h)
        if np.min(np.diff(w)) > 1e-8 * (w[-1] - w[0]):
            return h, local_terms
    raise UsageError(f"could not generate a collision-free Kronecker sum for dims {dims}")


def _gen_state_for(h: np.ndarray, seed: int) -> np.ndarray:
    eig = linalg.eig_decompose(h)
    for attempt in range(_GEN_RETRIES):
        psi = linalg.random_state(h.shape[0], seed + 1000 * attempt)
        check = labeling.check_conditions(eig, psi)
        if check.overlap_ok and check.min_overlap > 1e-3:
            return psi
    raise UsageError(f"could not generate a state with solid overlaps from seed {seed}")


def _gen_scrambled_klocal(dims, k: int, seed: int):
    n_qubits = len(dims)
    labels, mats, _, weights = klocal._pauli_basis(n_qubits)
    rng = np.random.default_rng(seed)
    h_local = np.zeros((2**n_qubits,) * 2, dtype=complex)
    for i in range(len(labels)):
        if 0 < weights[i] <= k:
            h_local += rng.standard_normal() * mats[i]
    hidden = linalg.random_unitary(2**n_qubits, seed + 1)
    return hidden @ h_local @ hidden.conj().T, hidden, h_local


# ---------------------------------------------------------------------------
# config handling


def _field(cfg: dict, name: str, default=None, required=False):
    if name in cfg:
        return cfg[name]
    if required:
        raise UsageError(f"config.{name}: missing required field")
    return default


def _load_ref(obj, loader, field: str):
    """Inline object or {"file": path} reference."""
    if isinstance(obj, dict) and set(obj.keys()) == {"file"}:
        path = Path(obj["file"])
        if not path.exists():
            raise UsageError(f"config.instance.{field}: file not found: {path}")
        return loader(load_json(path))
    try:
        return loader(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"config.instance.{field}: {exc}") from exc


def _validated_config(raw: dict) -> dict:
    experiment = _field(raw, "experiment", required=True)
    if experiment not in EXPERIMENTS:
        raise UsageError(
            f"config.experiment: unknown experiment {experiment!r}; choose from {EXPERIMENTS}"
        )
    seed = int(_field(raw, "seed", 0))
    shape = _field(raw, "shape", [2, 2])
    if not (isinstance(shape, list) and all(isinstance(d, int) and d >= 2 for d in shape)):
        raise UsageError("config.shape: expected a list of integers >= 2")
    if math.prod(shape) > 64:
        raise UsageError("config.shape: product of dimensions is capped at 64")
    time_grid = _field(raw, "time_grid", np.linspace(0.0, 5.0, 50).tolist())
    if sorted(time_grid) != list(time_grid):
        raise UsageError("config.time_grid: must be sorted ascending")
    tolerances = _field(raw, "tolerances", {})
    if not isinstance(tolerances, dict):
        raise UsageError("config.tolerances: expected a mapping")
    return {
        "experiment": experiment,
        "seed": seed,
        "shape": [int(d) for d in shape],
        "time_grid": [float(t) for t in time_grid],
        "tolerances": tolerances,
        "instance": _field(raw, "instance"),
        "output": _field(raw, "output"),
    }


def _instance_h_psi(cfg: dict):
    dims = tuple(cfg["shape"])
    n_total = math.prod(dims)
    inst = cfg["instance"]
    if inst:
        h = _load_ref(inst.get("h"), matrix_from_json, "h") if "h" in inst else None
        psi = _load_ref(inst.get("psi"), state_from_json, "psi") if "psi" in inst else None
    else:
        h = psi = None
    if h is None:
        h = _gen_random_h(n_total, cfg["seed"])
    if psi is None:
        psi = _gen_state_for(h, cfg["seed"] + 17)
    if h.shape != (n_total, n_total):
        raise UsageError(f"config.instance.h: dimension {h.shape[0]} does not match shape {dims}")
    if psi.shape != (n_total,):
        raise UsageError(f"config.instance.psi: dimension {psi.size} does not match shape {dims}")
    return h, linalg.normalize_state(psi)


# ---------------------------------------------------------------------------
# experiments; each returns (report_fields, tables) where tables maps a
# table name to (header, rows)


def _run_dims_audit(cfg):
    dims = tuple(cfg["shape"])
    h, _ = _instance_h_psi(cfg)
    eig = linalg.eig_decompose(h)
    rows = [
        ("tps_manifold_dim", tps_mod.tps_manifold_dim(dims)),
        ("stab_tps_dim", tps_mod.stab_tps_dim(dims)),
        ("stab_h_dim", tps_mod.stab_h_dim(eig)),
    ]
    n_total = math.prod(dims)
    if n_total <= 8:
        rows.append(("stab_h_dim_by_linear_solve", _commutant_dimension(h)))
    report = {"quantities": {name: int(v) for name, v in rows}, "passed": True}
    return report, {"audit": (["quantity", "value"], [[n, v] for n, v in rows])}


def _commutant_dimension(h: np.ndarray) -> int:
    n = h.shape[0]
    eye = np.eye(n)
    op = np.kron(eye, h.T) - np.kron(h, eye)
    s = np.linalg.svd(op, compute_uv=False)
    scale = max(1.0, float(s[0]))
    return int(np.sum(s <= 1e-9 * scale))


def _run_time_evolution_family(cfg, with_pairwise: bool):
    h, psi0 = _instance_h_psi(cfg)
    dims = tuple(cfg["shape"])
    eig = linalg.eig_decompose(h)
    tol_frozen = float(cfg["tolerances"].get("frozen", 1e-9))
    tol_cov = float(cfg["tolerances"].get("covariance", 1e-9))
    tol_equiv = float(cfg["tolerances"].get("equivalence", 1e-7))
    rep = construction.time_drift_experiment(
        eig, psi0, dims, cfg["time_grid"], pairwise=with_pairwise, equivalence_tol=tol_equiv
    )
    comoving_spread = float(np.max(np.ptp(rep.entropies_comoving, axis=0)))
    fixed_spread = float(np.max(np.ptp(rep.entropies_fixed, axis=0)))
    max_cov = float(np.max(rep.covariance_residuals))
    interaction = spectra.is_interaction_free(h, tps_mod.identity_tps(dims))
    report = {
        "comoving_entropy_spread": comoving_spread,
        "fixed_entropy_spread": fixed_spread,
        "max_covariance_residual": max_cov,
        "interaction_free_in_computational_tps": interaction.interaction_free,
        "passed": comoving_spread < tol_frozen and max_cov < tol_cov,
    }
    rows = []
    for i, t in enumerate(rep.time_grid):
        for k in range(len(dims)):
            rows.append(
                [float(t), k, rep.entropies_comoving[i, k], rep.entropies_fixed[i, k]]
            )
    tables = {
        "entropies": (["time", "subsystem", "comoving_entropy", "fixed_entropy"], rows)
    }
    if with_pairwise:
        inequivalent = sum(1 for _, _, v in rep.pairwise_verdicts if not v.equivalent)
        report["pairwise_total"] = len(rep.pairwise_verdicts)
        report["pairwise_inequivalent"] = inequivalent
        tables["pairs"] = (
            ["i", "j", "equivalent", "residual"],
            [[i, j, int(v.equivalent), v.residual] for i, j, v in rep.pairwise_verdicts],
        )
    return report, tables


def _run_locking(cfg):
    h, psi = _instance_h_psi(cfg)
    dims = tuple(cfg["shape"])
    eig = linalg.eig_decompose(h)
    inst = cfg["instance"] or {}
    if "psi_prime" in inst:
        psi_prime = _load_ref(inst["psi_prime"], state_from_json, "psi_prime")
        psi_prime = linalg.normalize_state(psi_prime)
    else:
        psi_prime = _gen_state_for(h, cfg["seed"] + 71)
    rep = construction.locking_experiment(eig, psi, psi_prime, dims)
    report = {
        "tps_equivalent": rep.verdict.equivalent,
        "equivalence_residual": rep.verdict.residual,
        "overlap_moduli_agree": rep.overlap_moduli_agree,
        "verdict": verdict_to_json(rep.verdict),
        "passed": True,
    }
    if rep.overlap_moduli_agree:
        pinned = float(
            np.max(np.abs(rep.input_entropies_first - rep.input_entropies_second))
        )
        report["pinned_row_gap"] = pinned
        report["passed"] = pinned < float(cfg["tolerances"].get("pinned", 1e-9))
    rows = [
        [k, rep.input_entropies_first[k], rep.input_entropies_second[k],
         rep.cross_entropies_second_under_first[k]]
        for k in range(len(dims))
    ]
    header = [
        "subsystem",
        "input_entropy_under_own_tps",
        "second_input_entropy_under_own_tps",
        "second_input_entropy_under_first_tps",
    ]
    return report, {"locking": (header, rows)}


def _run_physical_relevance(cfg):
    dims = tuple(cfg["shape"])
    inst = cfg["instance"] or {}
    if "tps1" in inst or "tps2" in inst:
        from .serialize import tps_from_json

        t1 = _load_ref(inst.get("tps1", {}), tps_from_json, "tps1")
        t2 = _load_ref(inst.get("tps2", {}), tps_from_json, "tps2")
    else:
        t1 = tps_mod.Tps(dims, linalg.random_unitary(math.prod(dims), cfg["seed"]))
        t2 = tps_mod.Tps(dims, linalg.random_unitary(math.prod(dims), cfg["seed"] + 1))
    budget = int(cfg["tolerances"].get("budget", 200))
    state = tps_mod.find_discriminating_state(t1, t2, budget, seed=cfg["seed"])
    ent1 = [tps_mod.entropy(t1, state, k) for k in range(len(dims))]
    ent2 = [tps_mod.entropy(t2, state, k) for k in range(len(dims))]
    report = {
        "entropies_in_first": ent1,
        "entropies_in_second": ent2,
        "state": state_to_json(state),
        "passed": max(ent1) <= 1e-9 and max(ent2) >= 1e-3,
    }
    rows = [[k, ent1[k], ent2[k]] for k in range(len(dims))]
    return report, {
        "discrimination": (["subsystem", "entropy_in_first", "entropy_in_second"], rows)
    }


def _run_sumset(cfg):
    dims = tuple(cfg["shape"])
    inst = cfg["instance"] or {}
    if "h" in inst:
        h = _load_ref(inst["h"], matrix_from_json, "h")
    else:
        h, _ = _gen_kronecker_h(dims, cfg["seed"])
    eig = linalg.eig_decompose(h)
    tol = float(cfg["tolerances"].get("sumset", 1e-9))
    dec = spectra.sumset_decompose(eig.eigenvalues, dims, tol)
    interaction = spectra.is_interaction_free(h, tps_mod.identity_tps(dims))
    report = {
        "decomposition": decomposition_to_json(dec) if dec else None,
        "decomposed": dec is not None,
        "interaction_free_in_computational_tps": interaction.interaction_free,
        "interaction_residual": interaction.residual,
        "passed": True,
    }
    rows = []
    if dec:
        for f, spec_vals in enumerate(dec.local_spectra):
            for i, v in enumerate(spec_vals):
                rows.append([f, i, float(v)])
    return report, {"locals": (["factor", "index", "value"], rows)}


def _run_klocal(cfg):
    dims = tuple(cfg["shape"])
    inst = cfg["instance"] or {}
    k = int(cfg["tolerances"].get("k", 2))
    if "h" in inst:
        h = _load_ref(inst["h"], matrix_from_json, "h")
    else:
        h, _, _ = _gen_scrambled_klocal(dims, k, cfg["seed"])
    restarts = int(cfg["tolerances"].get("restarts", 50))
    iters = int(cfg["tolerances"].get("iters", 2000))
    result = klocal.search_klocal_tps(h, k, dims, seeds=range(restarts), iters=iters)
    report = {
        "cost": result.cost,
        "winning_seed": result.seed,
        "restart_costs": [[s, c] for s, c in result.restart_costs],
        "tps": tps_to_json(result.best_tps),
        "passed": True,
    }
    rows = [[i, c] for i, c in enumerate(result.trace)]
    return report, {"trace": (["iteration", "cost"], rows)}


_RUNNERS = {
    "dims-audit": _run_dims_audit,
    "frozen-entropy": lambda cfg: _run_time_evolution_family(cfg, with_pairwise=False),
    "time-drift": lambda cfg: _run_time_evolution_family(cfg, with_pairwise=True),
    "locking": _run_locking,
    "physical-relevance": _run_physical_relevance,
    "sumset": _run_sumset,
    "klocal": _run_klocal,
}


def _write_tables(prefix: Path, tables: dict) -> list[str]:
    written = []
    for name, (header, rows) in sorted(tables.items()):
        path = prefix.parent / f"{prefix.name}_{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        written.append(str(path))
    return written


def run_experiment(cfg: dict) -> tuple[dict, dict]:
    """Execute a validated config; returns (report, tables)."""
    started = time.perf_counter()
    fields, tables = _RUNNERS[cfg["experiment"]](cfg)
    report = {
        "config": {k: v for k, v in cfg.items() if k != "output"},
        "conventions": CONVENTIONS,
        "wall_clock_s": time.perf_counter() - started,
        "tables": {name: {"header": h, "rows": r} for name, (h, r) in tables.items()},
        **fields,
    }
    return report, tables


def _cmd_run(args) -> int:
    try:
        raw = load_json(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"usage error: config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = _validated_config(raw)
        if args.seed is not None:
            cfg["seed"] = args.seed
        out_prefix = args.output or cfg["output"] or f"tpslab_{cfg['experiment']}"
        report, tables = run_experiment(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (labeling.ConditionError, tps_mod.DiscriminatingSearchError, ValueError) as exc:
        print(f"experiment failure: {exc}", file=sys.stderr)
        return 1
    prefix = Path(out_prefix)
    if prefix.parent != Path("."):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    save_json(report, prefix.parent / f"{prefix.name}.json")
    written = _write_tables(prefix, tables)
    print(f"wrote {prefix.name}.json and {len(written)} table(s) under {prefix.parent}")
    if not report.get("passed", True):
        print("experiment failure: demonstration target not met", file=sys.stderr)
        return 1
    return 0


def _cmd_gen(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    kind = args.kind
    try:
        if kind == "random-H":
            h = _gen_random_h(args.dim, args.seed)
            save_json(matrix_to_json(h), out / "h.json")
        elif kind == "kronecker-H":
            dims = _parse_dims(args.dims)
            h, local_terms = _gen_kronecker_h(dims, args.seed)
            save_json(matrix_to_json(h), out / "h.json")
            save_json({"locals": [matrix_to_json(x) for x in local_terms]}, out / "locals.json")
        elif kind == "scrambled-klocal":
            dims = _parse_dims(args.dims)
            if any(d != 2 for d in dims):
                raise UsageError("--dims: scrambled-klocal needs an all-qubit shape")
            h, hidden, h_local = _gen_scrambled_klocal(dims, args.k, args.seed)
            save_json(matrix_to_json(h), out / "h.json")
            save_json(
                {"hidden_unitary": matrix_to_json(hidden), "h_local": matrix_to_json(h_local)},
                out / "hidden.json",
            )
        elif kind == "random-state":
            if args.against:
                h = matrix_from_json(load_json(args.against))
                psi = _gen_state_for(h, args.seed)
            else:
                psi = linalg.random_state(args.dim, args.seed)
            save_json(state_to_json(psi), out / "psi.json")
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"--kind: unknown kind {kind}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {kind} instance to {out}")
    return 0


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--dims: {exc}") from exc
    if not dims or any(d < 2 for d in dims):
        raise UsageError("--dims: every dimension must be >= 2")
    return dims


def _cmd_check(args) -> int:
    from .checks import run_all_checks

    results = run_all_checks(seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, ok, detail in results:
        print(f"{name:<{width}}  {'pass' if ok else 'FAIL'}  {detail}")
        failures += not ok
    print(f"{len(results) - failures}/{len(results)} invariant checks passed")
    return 1 if failures else 0


def _cmd_report(args) -> int:
    try:
        report = load_json(args.input)
        tables = report["tables"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"usage error: report file: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.csv)
    outdir.mkdir(parents=True, exist_ok=True)
    prefix = outdir / Path(args.input).stem
    written = _write_tables(
        prefix, {name: (t["header"], t["rows"]) for name, t in tables.items()}
    )
    print(f"wrote {len(written)} table(s) under {outdir}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tpslab",
        description="Numerical laboratory for tensor product structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("-c", "--config", required=True)
    p_run.add_argument("-o", "--output", help="output path prefix")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.set_defaults(func=_cmd_run)

    p_gen = sub.add_parser("gen", help="generate instance files")
    p_gen.add_argument("--kind", required=True, choices=GEN_KINDS)
    p_gen.add_argument("--dims", default="2,2", help="comma-separated factor dimensions")
    p_gen.add_argument("--dim", type=int, default=4, help="total dimension (random-H/state)")
    p_gen.add_argument("--k", type=int, default=2, help="locality for scrambled-klocal")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--against", help="operator file a generated state must suit")
    p_gen.add_argument("-o", "--output", required=True, help="output directory")
    p_gen.set_defaults(func=_cmd_gen)

    p_check = sub.add_parser("check", help="run the seeded invariant suite")
    p_check.add_argument("--seed", type=int, default=7)
    p_check.set_defaults(func=_cmd_check)

    p_report = sub.add_parser("report", help="re-emit a report's CSV tables")
    p_report.add_argument("-i", "--input", required=True, help="report JSON file")
    p_report.add_argument("--csv", required=True, help="output directory for CSVs")
    p_report.set_defaults(func=_cmd_report)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    if "TPSLAB_THREADS" in os.environ:
        try:
            int(os.environ["TPSLAB_THREADS"])
        except ValueError:
            print("usage error: TPSLAB_THREADS must be an integer", file=sys.stderr)
            return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
