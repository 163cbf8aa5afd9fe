"""Command line front end.

Every artifact embeds the fully resolved configuration and master seed, so
any output file is reproducible from its own header. Timestamps are
metadata only and are excluded from payload comparisons.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import analysis, dynamics, protocols
from .config import ConfigError, RunConfig, load_config
from .groundstate import ConvergenceError, ground_state
from .rdm import exact_invariant
from .spincore import SpinState


def _payload(config: RunConfig | None, master_seed, schema: str, result) -> dict:
    return {
        "schema": f"topoprobe/{schema}@1",
        "created_at": datetime.now(timezone.utc).isoformat(),
        "master_seed": master_seed,
        "config": config.as_dict() if config is not None else {},
        "result": result,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=analysis._json_default)
        handle.write("\n")
    print(path)


def _out_dir(args, config: RunConfig | None) -> Path:
    if args.out:
        return Path(args.out)
    if config is not None and config.get("run", "out"):
        return Path(config.get("run", "out"))
    return Path(".")


def _seed(args, config: RunConfig) -> int:
    if args.seed is not None:
        return args.seed
    return config.master_seed()


def cmd_ground_state(args) -> int:
    config = load_config(args.config)
    spec = config.hamiltonian()
    result = ground_state(spec, seed=_seed(args, config))
    body = {
        "energy": result.energy,
        "residual_norm": result.residual_norm,
        "iterations": result.iterations,
        "num_sites": spec.num_sites,
    }
    _write_json(_out_dir(args, config) / "ground_state.json",
                _payload(config, _seed(args, config), "ground-state", body))
    return 0


def _prepared_state(config: RunConfig, seed: int) -> tuple[SpinState, object]:
    spec = config.hamiltonian()
    return ground_state(spec, seed=0).state, spec


def cmd_invariants(args) -> int:
    config = load_config(args.config)
    seed = _seed(args, config)
    state, spec = _prepared_state(config, seed)
    kind = config.require("protocol", "kind")
    partition = config.partition(spec.num_sites)
    if args.mode == "exact":
        value = exact_invariant(state, partition, kind)
        body = {
            "kind": kind, "mode": "exact", "raw": value.raw,
            "normalized": value.normalized,
            "purity_first": value.purity_first, "purity_second": value.purity_second,
        }
    else:
        params = protocols.ProtocolParams(
            kind, config.require("protocol", "n_unitaries"),
            config.require("protocol", "n_shots"), partition, seed,
        )
        records = protocols.run_campaign(state, params)
        normalized_kind = kind in ("reflection", "time_reversal")
        est = protocols.estimate_normalized(records, params) if normalized_kind \
            else protocols.estimate_raw(records, params)
        if args.exact_reference:
            exact = exact_invariant(state, partition, kind)
            reference = exact.normalized if normalized_kind else exact.raw
            est = replace(est, exact_reference=reference)
        body = {
            "kind": kind, "mode": "sampled", "value": est.value,
            "std_error": est.std_error, "n_unitaries": params.n_unitaries,
            "n_shots": params.n_shots, "master_seed": seed,
        }
        if est.exact_reference is not None:
            body["exact_reference"] = est.exact_reference
    _write_json(_out_dir(args, config) / "invariants.json",
                _payload(config, seed, "invariants", body))
    return 0


def _sweep_spec(config: RunConfig, kind: str, seed: int) -> analysis.SweepSpec:
    sweep = config.sections.get("sweep", {})
    axes = tuple((key[len("axis_"):], tuple(values))
                 for key, values in sweep.items() if key.startswith("axis_"))
    if not axes:
        raise ConfigError("sweep needs at least one axis_* key")
    return analysis.SweepSpec(
        base=config.hamiltonian(), kind=kind,
        pairs=config.require("partition", "pairs"), axes=axes,
        mode=sweep.get("mode", "exact"),
        n_unitaries=config.get("protocol", "n_unitaries", 512),
        n_shots=config.get("protocol", "n_shots", 256),
        repetitions=sweep.get("repetitions", 1),
        master_seed=seed,
    )


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    seed = _seed(args, config)
    kinds = config.get("sweep", "kinds") or (config.require("protocol", "kind"),)
    jobs = args.jobs or config.get("run", "jobs", 1)
    specs = [_sweep_spec(config, kind, seed) for kind in kinds]
    tables = [analysis.run_sweep(spec, jobs=jobs) for spec in specs]
    rows = []
    for table in tables:
        rows.extend(table)
    out = _out_dir(args, config)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"
    analysis.write_rows_csv(csv_path, rows)
    sidecar = _payload(config, seed, "sweep", {"rows": len(rows), "csv": csv_path.name})
    # correlation-length fits whenever the interval size is an axis
    fits = []
    for kind, table in zip(kinds, tables):
        by_pairs = [row for row in table if "pairs" in row and not row["error"]]
        if len(by_pairs) >= 3 and kind in ("reflection", "time_reversal"):
            other_keys = sorted({k for row in by_pairs for k in row
                                 if k not in ("pairs", "repetition", "kind", "mode",
                                              "seed", "value", "std_error", "exact", "error")})
            groups: dict[tuple, list] = {}
            for row in by_pairs:
                groups.setdefault(tuple(row[k] for k in other_keys), []).append(row)
            for group_key, group in groups.items():
                group.sort(key=lambda row: row["pairs"])
                values = [row["value"] for row in group]
                if len(values) < 3 or any(abs(v) >= 1 for v in values):
                    continue
                fit = analysis.fit_correlation_length([row["pairs"] for row in group], values)
                fits.append({"kind": kind,
                             **dict(zip(other_keys, group_key)),
                             "length_scale": fit.length_scale, "flag": fit.flag})
    if fits:
        sidecar["result"]["correlation_lengths"] = fits
    _write_json(out / "sweep.json", sidecar)
    print(csv_path)
    return 0


def cmd_adiabatic(args) -> int:
    config = load_config(args.config)
    seed = _seed(args, config)
    spec = config.hamiltonian()
    ramp_body = config.sections.get("ramp", {})
    sample_times = ramp_body.get("sample_times", ())
    ramp = dynamics.RampSpec(
        t_final=config.require("ramp", "t_final"),
        dt=ramp_body.get("dt", dynamics.DEFAULT_DT),
        neel_delta=ramp_body.get("neel_delta", 40.0 * abs(spec.j)),
        ramp_exponent=ramp_body.get("exponent", 4),
        sample_times=tuple(sample_times),
    )
    snapshots = dynamics.adiabatic_evolve(spec, ramp)
    partition = config.partition(spec.num_sites)
    kinds = tuple(ramp_body.get("monitor", ("reflection",)))
    rows = dynamics.monitor_invariants(snapshots, partition, kinds, "exact")
    out = _out_dir(args, config)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "adiabatic.csv"
    analysis.write_rows_csv(csv_path, rows)
    _write_json(out / "adiabatic.json", _payload(config, seed, "adiabatic", {
        "rows": len(rows), "csv": csv_path.name,
        "pinning_active": spec.pinning != 0.0,
        "t_final": ramp.t_final, "dt": ramp.dt,
    }))
    print(csv_path)
    return 0


def cmd_error_scan(args) -> int:
    config = load_config(args.config)
    seed = _seed(args, config)
    state, spec = _prepared_state(config, seed)
    partition = config.partition(spec.num_sites)
    params = protocols.ProtocolParams(
        config.require("protocol", "kind"), config.require("protocol", "n_unitaries"),
        config.require("protocol", "n_shots"), partition, seed,
    )
    rows = analysis.error_scaling_scan(
        state, params, config.require("error_scan", "axis"),
        [int(v) for v in config.require("error_scan", "values")],
        config.require("error_scan", "repetitions"),
    )
    out = _out_dir(args, config)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "error_scan.csv"
    analysis.write_rows_csv(csv_path, rows)
    _write_json(out / "error_scan.json",
                _payload(config, seed, "error-scan", {"rows": len(rows), "csv": csv_path.name}))
    print(csv_path)
    return 0


def cmd_twirl_check(args) -> int:
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    reports = [protocols.twirl_check(channel, args.samples, rng)
               for channel in ("phi", "psi")]
    body = {report.channel: {"n_samples": report.n_samples,
                             "frobenius_error": report.frobenius_error,
                             "target": report.target}
            for report in reports}
    _write_json(_out_dir(args, None) / "twirl_check.json",
                _payload(None, args.seed, "twirl-check", body))
    return 0


def cmd_campaign_export(args) -> int:
    config = load_config(args.config)
    seed = _seed(args, config)
    state, spec = _prepared_state(config, seed)
    partition = config.partition(spec.num_sites)
    params = protocols.ProtocolParams(
        config.require("protocol", "kind"), config.require("protocol", "n_unitaries"),
        config.require("protocol", "n_shots"), partition, seed,
    )
    records = protocols.run_campaign(state, params)
    out = _out_dir(args, config)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "campaign.records"
    protocols.write_records(path, records, params)
    print(path)
    return 0


def cmd_campaign_analyze(args) -> int:
    records, params = protocols.read_records(args.records)
    est = protocols.estimate_raw(records, params)
    body = {
        "kind": params.kind, "raw_value": est.value, "raw_std_error": est.std_error,
        "n_unitaries": params.n_unitaries, "n_shots": params.n_shots,
        "master_seed": params.master_seed,
    }
    if params.kind in ("reflection", "time_reversal"):
        norm = protocols.estimate_normalized(records, params)
        body["normalized_value"] = norm.value
        body["normalized_std_error"] = norm.std_error
    _write_json(_out_dir(args, None) / "campaign_analysis.json",
                _payload(None, params.master_seed, "campaign-analyze", body))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoprobe",
        description="randomized-measurement probes of topological order in spin chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--jobs", type=int, default=None, help="worker cap for sweeps")
        p.add_argument("--out", default=None, help="output directory")

    common(sub.add_parser("ground-state", help="solve for the ground state"))
    p_inv = sub.add_parser("invariants", help="exact or sampled invariant at one point")
    common(p_inv)
    mode = p_inv.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact")
    mode.add_argument("--sampled", dest="mode", action="store_const", const="sampled")
    p_inv.add_argument("--exact-reference", action="store_true",
                       help="also compute the exact oracle value in sampled mode")
    common(sub.add_parser("sweep", help="parameter sweep to CSV"))
    common(sub.add_parser("adiabatic", help="adiabatic ramp with invariant monitoring"))
    common(sub.add_parser("error-scan", help="statistical error scaling scan"))
    p_twirl = sub.add_parser("twirl-check", help="Monte Carlo twirling-identity check")
    p_twirl.add_argument("--samples", type=int, default=100000)
    common(p_twirl, config_required=False)
    common(sub.add_parser("campaign-export", help="persist raw measurement records"))
    p_an = sub.add_parser("campaign-analyze", help="re-estimate from persisted records")
    p_an.add_argument("--records", required=True)
    common(p_an, config_required=False)
    return parser


_COMMANDS = {
    "ground-state": cmd_ground_state,
    "invariants": cmd_invariants,
    "sweep": cmd_sweep,
    "adiabatic": cmd_adiabatic,
    "error-scan": cmd_error_scan,
    "twirl-check": cmd_twirl_check,
    "campaign-export": cmd_campaign_export,
    "campaign-analyze": cmd_campaign_analyze,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
