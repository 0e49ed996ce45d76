"""Command-line interface: validation, curvature reports, flows, certificates.

Subcommands
-----------
check      graph audit (connectivity, girth, admissibility) + curvature sum residual
curvature  per-edge curvature table (CSV or JSON)
jacobian   the curvature Jacobian matrix
spectrum   its eigenvalues (optionally the eigenbasis)
flow       integrate one prescribed-curvature flow, write trajectory + summary
densest    density certificates from both methods; exit 0 iff they agree
sweep      cartesian sweep over fractional orders / p values / seeds

Every flow summary echoes its fully resolved configuration, and random
initial states come from a counter-based generator seeded with --seed, so a
rerun with the same flags reproduces the summary byte for byte (modulo the
timestamp field).  Exit codes: 0 success, 1 validation failure, 2 aborted
flow; failures also emit a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import (
    average_curvature,
    curvature,
    curvature_rows,
    gauss_bonnet_residual,
    log_weights,
)
from .existence import max_density_bruteforce, max_density_maxflow
from .existence import MAX_BRUTEFORCE_VERTICES
from .flows import (
    CONSTANT_TARGET,
    FlowConfig,
    FlowKind,
    FlowRun,
    integrate,
    monitor_invariants,
)
from .graph import GraphError, WeightedGraph, audit, parse_edge_list
from .operators import jacobian, spectral_decompose


class CliError(ValueError):
    """Validation failure surfaced with exit code 1."""


def _load_graph(path: str) -> WeightedGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read graph file {path!r}: {exc}") from exc
    return parse_edge_list(text)


def _read_vector(path: str, n: int, what: str) -> np.ndarray:
    """Per-edge vector file: JSON array, or one value per line ('#' comments)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {what} file {path!r}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("["):
        values = [float(x) for x in json.loads(text)]
    else:
        values = []
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise CliError(
                    f"{what} file {path!r} line {line_no}: not a number: {line!r}"
                ) from None
    if len(values) != n:
        raise CliError(f"{what} file {path!r} has {len(values)} values, expected {n}")
    return np.asarray(values, dtype=float)


def _print_table(rows: list[dict], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(rows, indent=2, sort_keys=True))
        return
    if not rows:
        return
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def _cmd_check(args) -> int:
    g = _load_graph(args.graph)
    report = audit(g)
    payload = {
        "vertices": g.num_vertices,
        "edges": g.num_edges,
        "girth": "inf" if report.girth == float("inf") else int(report.girth),
        "connected": report.connected,
        "admissible": report.admissible,
    }
    if report.admissible and g.num_edges:
        kappa = curvature(g, log_weights(g))
        payload["gauss_bonnet_residual"] = gauss_bonnet_residual(g, kappa)
        payload["average_curvature"] = average_curvature(g)
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
    return 0 if report.admissible else 1


def _cmd_curvature(args) -> int:
    g = _load_graph(args.graph)
    _print_table(curvature_rows(g, log_weights(g)), args.format)
    return 0


def _cmd_jacobian(args) -> int:
    g = _load_graph(args.graph)
    J = jacobian(g, log_weights(g)).entries
    if args.format == "json":
        print(json.dumps({"jacobian": J.tolist()}, indent=2))
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        for row in J:
            writer.writerow([repr(x) for x in row])
    return 0


def _cmd_spectrum(args) -> int:
    g = _load_graph(args.graph)
    lam, Q = spectral_decompose(jacobian(g, log_weights(g)))
    if args.format == "json":
        payload = {"eigenvalues": lam.tolist()}
        if args.eigenbasis:
            payload["eigenbasis_rows"] = Q.tolist()
        print(json.dumps(payload, indent=2))
    else:
        print("eigenvalue")
        for value in lam:
            print(repr(float(value)))
        if args.eigenbasis:
            print("eigenbasis rows:")
            writer = csv.writer(sys.stdout, lineterminator="\n")
            for row in Q:
                writer.writerow([repr(float(x)) for x in row])
    return 0


def _flow_kind(args) -> FlowKind:
    if args.flow == "ricci":
        return FlowKind.ricci(args.ricci_sign)
    if args.flow == "calabi":
        return FlowKind.calabi()
    if args.flow == "fractional":
        return FlowKind.fractional(args.s)
    return FlowKind.pth(args.p)


def _initial_log_weights(args, g: WeightedGraph) -> np.ndarray:
    if args.init == "random":
        rng = np.random.Generator(np.random.Philox(args.seed))
        return rng.uniform(-1.0, 1.0, g.num_edges)
    if args.init == "file":
        return log_weights(g)
    return np.log(_read_vector(args.init, g.num_edges, "initial weights"))


def _resolved_config(args, g: WeightedGraph, kind: FlowKind, r0) -> dict:
    return {
        "graph": args.graph,
        "vertices": g.num_vertices,
        "edges": g.num_edges,
        "flow": kind.describe(),
        "target": args.target,
        "t_max": args.t_max,
        "rtol": args.rtol,
        "atol": args.atol,
        "convergence_tol": args.tol,
        "record_every": args.record_every,
        "init": args.init,
        "seed": args.seed,
        "r0": [float(x) for x in r0],
    }


def _write_trajectory_csv(path: str, run: FlowRun, n: int) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = (
            ["t"]
            + [f"r_{i + 1}" for i in range(n)]
            + [f"kappa_{i + 1}" for i in range(n)]
            + ["energy", "sum_r", "dissipation"]
        )
        writer.writerow(header)
        for s in run.samples:
            writer.writerow(
                [repr(s.t)]
                + [repr(float(x)) for x in s.r]
                + [repr(float(x)) for x in s.kappa]
                + [repr(s.energy), repr(s.sum_r), repr(s.dissipation)]
            )


def _summary_dict(config_echo: dict, run: FlowRun) -> dict:
    summary = {
        "config": config_echo,
        "status": {
            "state": run.status.state,
            "t": run.status.t,
            "reason": run.status.reason,
        },
        "t_final": run.samples[-1].t,
        "converged": run.status.converged,
        "rate_estimate": run.rate_estimate,
        "final_kappa_gap": float(np.abs(run.kappa_final - run.target).max()),
        "n_accepted": run.n_accepted,
        "n_rejected": run.n_rejected,
        "n_rhs": run.n_rhs,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if len(run.samples) >= 2:
        report = monitor_invariants(run)
        summary["invariants"] = {
            "max_sum_drift": report.max_sum_drift,
            "max_energy_jump": report.max_energy_jump,
            "max_dissipation": report.max_dissipation,
            "conserves_sum": report.conserves_sum,
            "num_samples": report.num_samples,
        }
    else:
        summary["invariants"] = None
    return summary


def _run_one_flow(g: WeightedGraph, args, kind: FlowKind, r0) -> tuple[FlowRun, dict]:
    target = CONSTANT_TARGET if args.target == "constant" else _read_vector(
        args.target, g.num_edges, "target curvature"
    )
    cfg = FlowConfig(
        kind=kind,
        r0=r0,
        target=target,
        t_max=args.t_max,
        rtol=args.rtol,
        atol=args.atol,
        convergence_tol=args.tol,
        record_every=args.record_every,
    )
    run = integrate(g, cfg)
    return run, _summary_dict(_resolved_config(args, g, kind, r0), run)


def _cmd_flow(args) -> int:
    g = _load_graph(args.graph)
    kind = _flow_kind(args)
    r0 = _initial_log_weights(args, g)
    run, summary = _run_one_flow(g, args, kind, r0)
    if args.out:
        _write_trajectory_csv(args.out, run, g.num_edges)
    text = json.dumps(summary, indent=2, sort_keys=True)
    if args.summary:
        Path(args.summary).write_text(text + "\n", encoding="utf-8")
    print(text)
    if run.status.state == "aborted":
        _emit_error("FlowAborted", run.status.reason or "aborted")
        return 2
    return 0


def _cmd_densest(args) -> int:
    g = _load_graph(args.graph)
    flow_cert = max_density_maxflow(g)
    payload = {"max_flow": flow_cert.to_json_dict()}
    agree = True
    if g.num_vertices <= MAX_BRUTEFORCE_VERTICES:
        brute = max_density_bruteforce(g)
        payload["brute_force"] = brute.to_json_dict()
        agree = (
            brute.exists == flow_cert.exists
            and brute.max_density == flow_cert.max_density
        )
    else:
        payload["brute_force"] = None
    payload["agree"] = agree
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0 if agree else 1


def _sweep_cells(args) -> list[tuple[FlowKind, int]]:
    cells = []
    for s in args.s_values:
        for seed in args.seeds:
            cells.append((FlowKind.fractional(s), seed))
    for p in args.p_values:
        for seed in args.seeds:
            cells.append((FlowKind.pth(p), seed))
    if not cells:
        raise CliError("sweep needs --s-values and/or --p-values")
    return cells


def _cell_name(kind: FlowKind, seed: int) -> str:
    if kind.kind == "fractional":
        return f"fractional_s{kind.s:g}_seed{seed}"
    return f"pth_p{kind.p:g}_seed{seed}"


def _cmd_sweep(args) -> int:
    g = _load_graph(args.graph)
    cells = _sweep_cells(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    env_cap = os.environ.get("CALABI_GRAPH_THREADS")
    workers = int(env_cap) if env_cap else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(cells)))

    def run_cell(cell):
        kind, seed = cell
        local = argparse.Namespace(**vars(args), seed=seed, init="random")
        rng = np.random.Generator(np.random.Philox(seed))
        r0 = rng.uniform(-1.0, 1.0, g.num_edges)
        run, summary = _run_one_flow(g, local, kind, r0)
        name = _cell_name(kind, seed)
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return name, run.status.state

    worst = 0
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        for name, state in pool.map(run_cell, cells):
            print(f"{name}: {state}")
            if state == "aborted":
                worst = 2
    return worst


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calabi-graph",
        description="Edge curvature and prescribed-curvature flows on girth >= 6 graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("graph", help="edge-list file: 'u v [w]' per line, '#' comments")

    p_check = sub.add_parser("check", help="audit a graph and its curvature sum")
    add_common(p_check)
    p_check.add_argument("--format", choices=("text", "json"), default="text")

    p_curv = sub.add_parser("curvature", help="per-edge curvature table")
    add_common(p_curv)
    p_curv.add_argument("--format", choices=("csv", "json"), default="csv")

    p_jac = sub.add_parser("jacobian", help="curvature Jacobian matrix")
    add_common(p_jac)
    p_jac.add_argument("--format", choices=("csv", "json"), default="csv")

    p_spec = sub.add_parser("spectrum", help="Jacobian eigenvalues")
    add_common(p_spec)
    p_spec.add_argument("--format", choices=("csv", "json"), default="csv")
    p_spec.add_argument("--eigenbasis", action="store_true", help="include the eigenbasis")

    p_flow = sub.add_parser("flow", help="integrate one prescribed-curvature flow")
    add_common(p_flow)
    p_flow.add_argument("--flow", choices=("ricci", "calabi", "fractional", "pth"), required=True)
    p_flow.add_argument("--s", type=float, default=0.5, help="fractional order (flow=fractional)")
    p_flow.add_argument("--p", type=float, default=3.0, help="p-th order, > 1 (flow=pth)")
    p_flow.add_argument("--ricci-sign", choices=("gradient", "literal"), default="gradient")
    p_flow.add_argument("--target", default="constant", help="'constant' or a per-edge value file")
    p_flow.add_argument("--t-max", type=float, default=1e4, dest="t_max")
    p_flow.add_argument("--tol", type=float, default=1e-9, help="convergence threshold on max|kappa - target|")
    p_flow.add_argument("--rtol", type=float, default=1e-8)
    p_flow.add_argument("--atol", type=float, default=1e-10)
    p_flow.add_argument("--init", default="file", help="'file' (graph weights), 'random', or a weight file")
    p_flow.add_argument("--seed", type=int, default=0, help="seed for --init random")
    p_flow.add_argument("--record-every", type=int, default=1, dest="record_every")
    p_flow.add_argument("--out", help="trajectory CSV path")
    p_flow.add_argument("--summary", help="summary JSON path")

    p_dense = sub.add_parser("densest", help="constant-curvature existence certificates")
    add_common(p_dense)

    p_sweep = sub.add_parser("sweep", help="run a grid of fractional/p-th flows")
    add_common(p_sweep)
    p_sweep.add_argument("--s-values", type=_float_list, default=[], dest="s_values")
    p_sweep.add_argument("--p-values", type=_float_list, default=[], dest="p_values")
    p_sweep.add_argument("--seeds", type=_int_list, default=[0], dest="seeds")
    p_sweep.add_argument("--target", default="constant")
    p_sweep.add_argument("--t-max", type=float, default=1e4, dest="t_max")
    p_sweep.add_argument("--tol", type=float, default=1e-9)
    p_sweep.add_argument("--rtol", type=float, default=1e-8)
    p_sweep.add_argument("--atol", type=float, default=1e-10)
    p_sweep.add_argument("--record-every", type=int, default=1, dest="record_every")
    p_sweep.add_argument("--out-dir", default="sweep-out", dest="out_dir")

    return parser


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


_COMMANDS = {
    "check": _cmd_check,
    "curvature": _cmd_curvature,
    "jacobian": _cmd_jacobian,
    "spectrum": _cmd_spectrum,
    "flow": _cmd_flow,
    "densest": _cmd_densest,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CliError, GraphError, ValueError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
