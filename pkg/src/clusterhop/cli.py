"""Command-line pipeline: scenario -> capacities -> snapshots -> plan ->
benchmark comparison -> reports.

Every subcommand is a pure function of (scenario file, flags, seed); output
files are written with sorted keys and repr'd floats so identical invocations
produce byte-identical artifacts. Exit codes: 0 ok, 2 parse/validate,
3 infeasible, 4 resource cap, 5 I/O.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import benchmarks, channel, metrics, precoding
from .errors import ClusterHopError
from .planner import (IlpInstance, brute_force_plan, greedy_plan,
                      solve_illumination)
from .scenario import (Scenario, aggregate_and_scale_demands, load_scenario,
                       scenario_summary)
from .snapshots import build_snapshot_set, dump_v_csv

SOLVERS = ("ilp", "greedy", "oracle")
SCHEME_CH = "ch"
ALL_SCHEMES = (SCHEME_CH, benchmarks.FOUR_COLOR, benchmarks.ONE_COLOR_BH)


@dataclass(frozen=True)
class RunManifest:
    scenario_path: str
    out_dir: str
    command: str
    solver: str = "ilp"
    schemes: tuple[str, ...] = ALL_SCHEMES
    seed: int | None = None
    dvbs2_table: str | None = None


def _load(manifest: RunManifest) -> Scenario:
    scenario = load_scenario(manifest.scenario_path)
    if manifest.seed is not None:
        system = dataclasses.replace(scenario.system, seed=manifest.seed)
        scenario = dataclasses.replace(scenario, system=system)
    return scenario


def _solve(manifest: RunManifest, instance: IlpInstance):
    if manifest.solver == "greedy":
        return greedy_plan(instance)
    if manifest.solver == "oracle":
        return brute_force_plan(instance)
    return solve_illumination(instance)


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _write_json(path: Path, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _knobs(manifest: RunManifest, scenario: Scenario) -> dict:
    return {
        "command": manifest.command,
        "scenario": str(manifest.scenario_path),
        "solver": manifest.solver,
        "schemes": list(manifest.schemes),
        "seed": scenario.system.seed,
        "dvbs2_table": manifest.dvbs2_table or "builtin",
        "adjacency_rule": "center distance <= 1.1 x nominal pitch",
        "rx_gain_dbi": channel.RX_GAIN_DBI,
        "slant_range_m": channel.SLANT_RANGE_M,
        "polarization_factor": 2 if scenario.system.dual_polarization else 1,
    }


def run(manifest: RunManifest) -> list[str]:
    """Execute one subcommand; returns the list of files written."""
    scenario = _load(manifest)
    out = Path(manifest.out_dir)
    table = precoding.load_dvbs2_table(manifest.dvbs2_table)
    written: list[str] = []

    def emit(name: str, writer) -> None:
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        writer(path)
        written.append(str(path))

    if manifest.command == "validate":
        print(json.dumps(scenario_summary(scenario), indent=2, sort_keys=True))
        return written

    if manifest.command == "capacity":
        chans = channel.build_all_cluster_channels(scenario)
        snir_lin, se, r = precoding.beam_links(scenario, chans, table)
        caps = precoding.cluster_capacities(scenario, chans, table)
        assignment = scenario.clusters.assignment()

        def beams_csv(path):
            lines = ["beam_id,cluster_id,snir_db,se_bits_per_symbol,capacity_bps"]
            for i, beam in enumerate(scenario.beams):
                snir_db = (10 * math.log10(snir_lin[i])
                           if snir_lin[i] > 0 else -math.inf)
                lines.append(
                    f"{beam.id},{assignment[i]},{float(snir_db)!r},"
                    f"{float(se[i])!r},{float(r[i])!r}"
                )
            _write_text(path, "\n".join(lines) + "\n")

        def clusters_csv(path):
            lines = ["cluster_id,n_beams,capacity_bps,supply_bits_per_slot"]
            for j in range(scenario.n_clusters):
                lines.append(
                    f"{j},{len(scenario.clusters.members[j])},"
                    f"{float(caps.c_cluster_bps[j])!r},"
                    f"{float(caps.p_cluster_bits[j])!r}"
                )
            _write_text(path, "\n".join(lines) + "\n")

        emit("capacity_beams.csv", beams_csv)
        emit("capacity_clusters.csv", clusters_csv)

    elif manifest.command == "snapshots":
        snaps = _snapshots(scenario, table)
        emit("snapshots.csv", lambda p: dump_v_csv(snaps.v, p))

    elif manifest.command == "plan":
        snaps = _snapshots(scenario, table)
        _, m = aggregate_and_scale_demands(scenario)
        plan = _solve(manifest, IlpInstance(l=snaps.l, m=m,
                                            n_slot=scenario.system.n_slot))
        doc = {
            "psi": {str(i): int(plan.psi[i]) for i in np.flatnonzero(plan.psi)},
            "t": None if math.isinf(plan.t) else plan.t,
            "s_bits": [float(x) for x in plan.s],
            "schedule": [int(x) for x in plan.schedule],
            "status": plan.solver_status,
            "selected_snapshots": {
                str(i): list(snaps.members(int(i)))
                for i in np.flatnonzero(plan.psi)
            },
        }
        emit("plan.json", lambda p: _write_json(p, doc))

    elif manifest.command == "compare":
        field = channel.build_beam_field(scenario)
        reports = []
        for scheme in manifest.schemes:
            if scheme == SCHEME_CH:
                chans = channel.build_all_cluster_channels(scenario)
                caps = precoding.cluster_capacities(scenario, chans, table)
                snaps = build_snapshot_set(scenario.adjacency,
                                           scenario.system.n_p,
                                           caps.p_cluster_bits)
                _, m = aggregate_and_scale_demands(scenario)
                plan = _solve(manifest, IlpInstance(
                    l=snaps.l, m=m, n_slot=scenario.system.n_slot))
                offered = metrics.plan_beam_offered(plan, scenario)
            elif scheme == benchmarks.FOUR_COLOR:
                offered = benchmarks.four_color_evaluate(
                    scenario, field, table).offered_bps
            elif scheme == benchmarks.ONE_COLOR_BH:
                offered = benchmarks.bh_evaluate(
                    scenario, field, table).offered_bps
            else:
                raise ValueError(f"unknown scheme {scheme}")
            reports.append(metrics.score(offered, scenario, scheme))
        for report in reports:
            emit(f"report_beams_{report.scheme}.csv",
                 lambda p, r=report: _write_text(
                     p, "\n".join(metrics.beam_csv_lines(r, scenario)) + "\n"))
            emit(f"report_clusters_{report.scheme}.csv",
                 lambda p, r=report: _write_text(
                     p, "\n".join(metrics.cluster_csv_lines(r)) + "\n"))
        emit("summary.json",
             lambda p: metrics.write_summary_json(reports, p))

    elif manifest.command == "leakage":
        chans = channel.build_all_cluster_channels(scenario)
        caps = precoding.cluster_capacities(scenario, chans, table)
        snaps = build_snapshot_set(scenario.adjacency, scenario.system.n_p,
                                   caps.p_cluster_bits)
        _, m = aggregate_and_scale_demands(scenario)
        plan = _solve(manifest, IlpInstance(l=snaps.l, m=m,
                                            n_slot=scenario.system.n_slot))
        field = channel.build_beam_field(scenario)
        leak = metrics.cross_cluster_leakage(scenario, field, snaps, plan)
        doc = {
            "per_slot_worst_ratio": leak,
            "max_ratio": max(leak) if leak else 0.0,
        }
        emit("leakage.json", lambda p: _write_json(p, doc))

    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown command {manifest.command}")

    if written:
        config = _knobs(manifest, scenario)
        config["files"] = sorted(Path(p).name for p in written)
        path = out / "run_config.json"
        _write_json(path, config)
        written.append(str(path))
    return written


def _snapshots(scenario: Scenario, table):
    chans = channel.build_all_cluster_channels(scenario)
    caps = precoding.cluster_capacities(scenario, chans, table)
    return build_snapshot_set(scenario.adjacency, scenario.system.n_p,
                              caps.p_cluster_bits)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterhop",
        description="Cluster-hopping planner for multi-beam HTS systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("validate", "load and validate a scenario file"),
        ("capacity", "per-beam and per-cluster MMSE capacities"),
        ("snapshots", "enumerate valid snapshots and dump the 0/1 matrix"),
        ("plan", "solve the illumination plan and write plan.json"),
        ("compare", "evaluate CH against the benchmark schemes"),
        ("leakage", "cross-cluster interference diagnostic for the plan"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", required=True, help="scenario JSON file")
        cmd.add_argument("--out", default="out", help="output directory")
        cmd.add_argument("--solver", choices=SOLVERS, default="ilp")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the scenario RNG seed")
        cmd.add_argument("--dvbs2-table", default=None,
                         help="alternative MODCOD CSV")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    manifest = RunManifest(
        scenario_path=args.scenario,
        out_dir=args.out,
        command=args.command,
        solver=args.solver,
        seed=args.seed,
        dvbs2_table=args.dvbs2_table,
    )
    try:
        written = run(manifest)
    except ClusterHopError as exc:
        print(f"error: {exc.error_class}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 5
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
