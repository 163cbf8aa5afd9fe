"""Parameter sweeps, correlation-length fits, and error-scaling studies.

Sweeps evaluate the Cartesian product of the requested axes; every row
carries the full inputs, outputs, errors, and seeds, so a CSV dump plus its
JSON sidecar reproduces the run. A per-point failure is recorded in the
row's ``error`` column and the sweep continues.

Statistical error in the scaling scans is the mean absolute deviation of
the sampled estimate from the exact contraction, averaged over independent
campaign repetitions; at desk scale the exact value is always available, so
no self-referential error proxy is needed.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace

import numpy as np

from .groundstate import ground_state
from .hamiltonians import HamiltonianSpec
from .partitions import PartitionSpec, reflection_partition, three_segment_partition
from .protocols import ProtocolParams, estimate_normalized, estimate_raw, run_campaign
from .rdm import exact_invariant

SWEEPABLE = ("j_prime", "delta", "b_field", "pairs", "n_unitaries", "n_shots")
FIT_POINT_COUNT = 3


@dataclass(frozen=True)
class SweepSpec:
    """Axes over Hamiltonian/protocol parameters around a fixed base point."""

    base: HamiltonianSpec
    kind: str
    pairs: int
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    mode: str = "exact"
    n_unitaries: int = 512
    n_shots: int = 256
    repetitions: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if not self.axes:
            raise ValueError("need at least one sweep axis")
        for name, values in self.axes:
            if name not in SWEEPABLE:
                raise ValueError(f"cannot sweep over {name!r} (allowed: {SWEEPABLE})")
            if len(values) == 0 or not all(np.isfinite(v) for v in values):
                raise ValueError(f"axis {name!r} needs finite values")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def _partition_for(kind: str, num_sites: int, pairs: int) -> PartitionSpec:
    if kind in ("d2", "klein_bottle"):
        return three_segment_partition(num_sites, pairs)
    return reflection_partition(num_sites, pairs)


def _axis_grid(axes) -> list[dict]:
    points = [{}]
    for name, values in axes:
        points = [dict(p, **{name: v}) for p in points for v in values]
    return points


def _sweep_point(spec: SweepSpec, point: dict, repetition: int, point_seed: int,
                 ground_cache: dict, failed_solves: dict) -> dict:
    row = {name: point[name] for name, _values in spec.axes}
    row.update(repetition=repetition, kind=spec.kind, mode=spec.mode,
               seed=point_seed, value=None, std_error=None, exact=None, error="")
    try:
        ham_updates = {k: v for k, v in point.items()
                       if k in ("j_prime", "delta", "b_field")}
        ham = replace(spec.base, **ham_updates) if ham_updates else spec.base
        pairs = int(point.get("pairs", spec.pairs))
        partition = _partition_for(spec.kind, ham.num_sites, pairs)
        key = tuple(sorted(ham.__dict__.items()))
        if key not in ground_cache:
            raise RuntimeError(f"ground-state solve failed: {failed_solves.get(key, 'unknown')}")
        state = ground_cache[key]
        # reported value: normalized invariant for the two-segment kinds,
        # raw for d2/klein_bottle (no standard normalization)
        normalized_kind = spec.kind in ("reflection", "time_reversal")
        exact = exact_invariant(state, partition, spec.kind)
        row["exact"] = exact.normalized if normalized_kind else exact.raw
        if spec.mode == "exact":
            row["value"] = row["exact"]
        else:
            params = ProtocolParams(
                spec.kind, int(point.get("n_unitaries", spec.n_unitaries)),
                int(point.get("n_shots", spec.n_shots)), partition, point_seed,
            )
            records = run_campaign(state, params)
            est = estimate_normalized(records, params) if normalized_kind \
                else estimate_raw(records, params)
            row["value"] = est.value
            row["std_error"] = est.std_error
    except Exception as exc:  # per-point failures must not kill the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """Evaluate the sweep grid; rows are ordered by the axis tuples and are
    a pure function of (spec, master_seed) regardless of ``jobs``.

    Ground states are solved once per distinct Hamiltonian up front; the
    grid points are then independent tasks with pre-assigned seeds, so a
    worker pool changes nothing but wall time.
    """
    seed_rng = np.random.default_rng(spec.master_seed)
    tasks = []
    ground_cache: dict[tuple, object] = {}
    failed_solves: dict[tuple, str] = {}
    for point in _axis_grid(spec.axes):
        for repetition in range(spec.repetitions):
            point_seed = int(seed_rng.integers(0, 2 ** 63 - 1))
            tasks.append((point, repetition, point_seed))
            ham_updates = {k: v for k, v in point.items()
                           if k in ("j_prime", "delta", "b_field")}
            try:
                ham = replace(spec.base, **ham_updates) if ham_updates else spec.base
            except Exception:
                continue  # recorded per-row when the point runs
            key = tuple(sorted(ham.__dict__.items()))
            if key not in ground_cache and key not in failed_solves:
                try:
                    ground_cache[key] = ground_state(ham, seed=0).state
                except Exception as exc:
                    failed_solves[key] = f"{type(exc).__name__}: {exc}"

    def evaluate(task):
        point, repetition, point_seed = task
        return _sweep_point(spec, point, repetition, point_seed, ground_cache,
                            failed_solves)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(evaluate, tasks))
    return [evaluate(task) for task in tasks]


def write_rows_csv(path, rows: list[dict]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_sidecar_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dict__"):
        return obj.__dict__
    raise TypeError(f"cannot serialize {type(obj)}")


# -- correlation length ------------------------------------------------------

@dataclass(frozen=True)
class CorrelationLengthFit:
    length_scale: float
    fit_points: tuple[tuple[float, float], ...]
    quantized_target: float
    residual: float
    flag: str = ""


def fit_correlation_length(pair_counts, values, target_sign: float | None = None) -> CorrelationLengthFit:
    """Exponential convergence scale of the invariant toward its quantized
    value: least squares of log(1 - sign * value) against the pair count,
    on the first three points.

    Signed deviations that are zero or negative (the series has reached or
    overshot the quantized value) cannot be log-fitted; those series return
    a zero length scale with a flag.
    """
    pair_counts = np.asarray(pair_counts, dtype=float)
    values = np.asarray(values, dtype=float)
    if pair_counts.shape != values.shape or pair_counts.size < FIT_POINT_COUNT:
        raise ValueError(f"need at least {FIT_POINT_COUNT} (pair count, value) points")
    if np.any(np.abs(values) >= 1.0):
        raise ValueError("fit requires |value| < 1 for every point")
    sign = float(target_sign) if target_sign is not None else float(np.sign(values[-1]))
    if sign not in (-1.0, 1.0):
        raise ValueError("target sign must be -1 or +1")
    ns = pair_counts[:FIT_POINT_COUNT]
    deviations = 1.0 - sign * values[:FIT_POINT_COUNT]
    points = tuple(zip(ns.tolist(), values[:FIT_POINT_COUNT].tolist()))
    if np.any(deviations <= 0.0):
        return CorrelationLengthFit(0.0, points, sign, 0.0, flag="already_converged")
    log_dev = np.log(deviations)
    slope, intercept = np.polyfit(ns, log_dev, 1)
    residual = float(np.sqrt(np.mean((log_dev - (slope * ns + intercept)) ** 2)))
    if slope >= 0.0:
        return CorrelationLengthFit(np.inf, points, sign, residual, flag="non_decaying")
    return CorrelationLengthFit(float(-1.0 / slope), points, sign, residual)


# -- error scaling -------------------------------------------------------------

def error_scaling_scan(state, base: ProtocolParams, axis: str, values,
                       repetitions: int, exact_value: float | None = None) -> list[dict]:
    """Mean absolute estimator error versus one protocol axis.

    Each grid point runs ``repetitions`` campaigns with independent derived
    seeds; the error is measured against the exact contraction of the raw
    invariant.
    """
    if axis not in ("n_unitaries", "n_shots", "pairs"):
        raise ValueError(f"axis must be n_unitaries, n_shots or pairs, got {axis!r}")
    if repetitions < 8:
        raise ValueError("need at least 8 repetitions for a stable mean error")
    seed_rng = np.random.default_rng(base.master_seed)
    rows = []
    for value in values:
        if axis == "pairs":
            partition = _partition_for(base.kind, state.num_sites, int(value))
            params = replace(base, partition=partition)
        else:
            params = replace(base, **{axis: int(value)})
        exact = exact_value if exact_value is not None and axis != "pairs" else \
            exact_invariant(state, params.partition, base.kind).raw
        errors = np.empty(repetitions)
        for rep in range(repetitions):
            rep_params = replace(params, master_seed=int(seed_rng.integers(0, 2 ** 63 - 1)))
            records = run_campaign(state, rep_params)
            errors[rep] = abs(estimate_raw(records, rep_params).value - exact)
        rows.append({
            "axis": axis, "value": value, "mean_abs_error": float(errors.mean()),
            "std_of_mean": float(errors.std() / np.sqrt(repetitions)),
            "repetitions": repetitions, "exact": exact,
        })
    return rows


# -- symmetry breaking ------------------------------------------------------------

def symmetry_breaking_report(base: HamiltonianSpec, pair_counts=(1, 2, 3),
                             seed: int = 0) -> dict:
    """Reflection and time-reversal invariant series on the same ground
    state, for diagnosing which protecting symmetry survives a perturbation."""
    if base.b_field == 0.0:
        raise ValueError("symmetry-breaking report needs a nonzero b_field")
    state = ground_state(base, seed=seed).state
    report = {"spec": base.__dict__, "pair_counts": list(pair_counts),
              "reflection": [], "time_reversal": []}
    for pairs in pair_counts:
        partition = reflection_partition(base.num_sites, pairs)
        report["reflection"].append(exact_invariant(state, partition, "reflection").normalized)
        report["time_reversal"].append(exact_invariant(state, partition, "time_reversal").normalized)
    return report
