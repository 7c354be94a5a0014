"""Command line front end: ``sim``, ``eqcheck``, ``bench`` and ``plot``.

Exit codes: 0 success (equivalent, for eqcheck), 1 error, 2 timeout,
3 non-equivalent.  Reports print to stdout as text, JSON or CSV;
diagnostics go to stderr.  ``bench`` sweeps a directory of circuits and
emits one CSV row per instance plus optional speedup summary lines
(prefixed ``#``) against a baseline CSV; rendering figures from those
CSVs is ``plot``'s job, keeping the measurement path free of plotting.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import threading
from dataclasses import dataclass, field

import numpy as np

from . import qasm
from .eqcheck import check_alternating, check_pauli
from .errors import ComputationCancelledError, EvddError
from .node_store import NormStrategy
from .ops import DDEngine
from .sim import sample, simulate

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2
EXIT_NONEQUIVALENT = 3

BENCH_HEADER = ["name", "n", "gates", "status", "seconds", "nodes",
                "sharing", "verdict"]


@dataclass
class RunConfig:
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    tolerance: float = 1e-14
    norm_strategy: str = "max"
    node_table_log2: int = 24
    value_table_log2: int = 23
    op_cache_log2: int = 22
    par_cutoff: int = 6
    timeout: float | None = None
    seed: int = 1
    shots: int = 0
    output: str = "text"
    gc: bool = False

    def make_engine(self) -> DDEngine:
        return DDEngine(
            workers=self.workers,
            tolerance=self.tolerance,
            norm_strategy=NormStrategy(self.norm_strategy),
            node_table_log2=self.node_table_log2,
            value_table_log2=self.value_table_log2,
            op_cache_log2=self.op_cache_log2,
            par_cutoff=self.par_cutoff)


def _add_shared_flags(p: argparse.ArgumentParser):
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="worker threads (default: hardware threads)")
    p.add_argument("--tolerance", type=float, default=1e-14,
                   help="closeness threshold for edge weights")
    p.add_argument("--norm-strategy", choices=["low", "min", "max", "l2"],
                   default="max")
    p.add_argument("--node-table-size", type=int, default=24, metavar="LOG2")
    p.add_argument("--value-table-size", type=int, default=23, metavar="LOG2")
    p.add_argument("--op-cache-size", type=int, default=22, metavar="LOG2")
    p.add_argument("--par-cutoff", type=int, default=6,
                   help="spawn tasks only above this many remaining variables")
    p.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--output", choices=["json", "csv", "text"], default="text")
    p.add_argument("--gc", choices=["on", "off"], default="off",
                   help="mark-and-sweep between gate applications")


def _config_from(args) -> RunConfig:
    return RunConfig(
        workers=args.workers, tolerance=args.tolerance,
        norm_strategy=args.norm_strategy,
        node_table_log2=args.node_table_size,
        value_table_log2=args.value_table_size,
        op_cache_log2=args.op_cache_size,
        par_cutoff=args.par_cutoff, timeout=args.timeout,
        seed=args.seed, shots=args.shots, output=args.output,
        gc=args.gc == "on")


class _Watchdog:
    """Sets the engine's cancel flag after a wall-clock budget."""

    def __init__(self, engine: DDEngine, timeout: float | None):
        self._timer = None
        if timeout is not None:
            self._timer = threading.Timer(timeout, engine.cancel)
            self._timer.daemon = True

    def __enter__(self):
        if self._timer is not None:
            self._timer.start()
        return self

    def __exit__(self, *exc):
        if self._timer is not None:
            self._timer.cancel()


def _emit(report: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    elif fmt == "csv":
        fields = [k for k, v in sorted(report.items())
                  if not isinstance(v, dict)]
        writer = csv.writer(sys.stdout)
        writer.writerow(fields)
        writer.writerow([report[k] for k in fields])
    else:
        width = max(len(k) for k in report)
        for k, v in report.items():
            if isinstance(v, dict):
                print(f"{k:<{width}}  " + " ".join(
                    f"{kk}:{vv}" for kk, vv in sorted(v.items())))
            else:
                print(f"{k:<{width}}  {v}")


def cmd_sim(path: str, cfg: RunConfig) -> int:
    try:
        circuit = qasm.parse_file(path)
    except (OSError, EvddError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    engine = cfg.make_engine()
    try:
        with _Watchdog(engine, cfg.timeout):
            result = simulate(engine, circuit, gc=cfg.gc)
            histogram = None
            if cfg.shots > 0:
                histogram = sample(engine, result.state, cfg.shots,
                                   cfg.seed, result.n)
    except ComputationCancelledError:
        print(f"timeout after {cfg.timeout}s: {circuit.source_name}",
              file=sys.stderr)
        return EXIT_TIMEOUT
    except EvddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        engine.close()
    report = {
        "command": "sim",
        "circuit": circuit.source_name,
        "n": result.n,
        "gates": result.gate_count,
        "status": "ok",
        "seconds": round(result.wall_time, 6),
        "final_nodes": result.final_nodes,
        "peak_nodes": result.peak_nodes,
        "sharing": result.sharing_class,
        "l2_norm": result.l2_norm,
        "workers": cfg.workers,
        "norm_strategy": cfg.norm_strategy,
        "tolerance": cfg.tolerance,
        "seed": cfg.seed,
        "shots": cfg.shots,
    }
    if histogram is not None:
        report["histogram"] = dict(sorted(histogram.items()))
    _emit(report, cfg.output)
    return EXIT_OK


def cmd_eqcheck(path_u: str, path_v: str, algorithm: str,
                cfg: RunConfig) -> int:
    try:
        u = qasm.parse_file(path_u)
        v = qasm.parse_file(path_v)
    except (OSError, EvddError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    engine = cfg.make_engine()
    check = check_alternating if algorithm == "alternating" else check_pauli
    try:
        with _Watchdog(engine, cfg.timeout):
            verdict = check(engine, u, v)
    except ComputationCancelledError:
        print(f"timeout after {cfg.timeout}s", file=sys.stderr)
        return EXIT_TIMEOUT
    except EvddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        engine.close()
    report = {
        "command": "eqcheck",
        "u": u.source_name,
        "v": v.source_name,
        "algorithm": algorithm,
        "status": "ok",
        "equivalent": verdict.equivalent,
        "witness": verdict.witness,
        "seconds": round(verdict.wall_time, 6),
        "peak_nodes": verdict.peak_nodes,
        "workers": cfg.workers,
    }
    if verdict.factor is not None:
        report["factor_re"] = verdict.factor.real
        report["factor_im"] = verdict.factor.imag
    _emit(report, cfg.output)
    return EXIT_OK if verdict.equivalent else EXIT_NONEQUIVALENT


def _bench_instances(directory: str, mode: str):
    names = sorted(f for f in os.listdir(directory) if f.endswith(".qasm"))
    if mode == "sim":
        for f in names:
            yield f[:-5], (os.path.join(directory, f),)
    else:
        for f in names:
            if f.endswith("_alt.qasm"):
                continue
            alt = f[:-5] + "_alt.qasm"
            if alt in names:
                yield f[:-5], (os.path.join(directory, f),
                               os.path.join(directory, alt))


def _run_bench_instance(name: str, paths, mode: str, cfg: RunConfig) -> dict:
    row = dict.fromkeys(BENCH_HEADER, "")
    row["name"] = name
    engine = cfg.make_engine()
    try:
        circuits = [qasm.parse_file(p) for p in paths]
        row["n"] = circuits[0].n
        row["gates"] = sum(c.gate_count for c in circuits)
        with _Watchdog(engine, cfg.timeout):
            if mode == "sim":
                result = simulate(engine, circuits[0], gc=cfg.gc)
                row.update(status="ok", seconds=round(result.wall_time, 6),
                           nodes=result.final_nodes,
                           sharing=result.sharing_class)
            else:
                verdict = check_alternating(engine, *circuits)
                row.update(status="ok", seconds=round(verdict.wall_time, 6),
                           nodes=verdict.peak_nodes,
                           verdict="equivalent" if verdict.equivalent
                           else "non-equivalent")
    except ComputationCancelledError:
        row["status"] = "timeout"
        row["seconds"] = row["nodes"] = row["sharing"] = row["verdict"] = ""
    except (OSError, EvddError) as exc:
        row["status"] = "error"
        print(f"error: {name}: {exc}", file=sys.stderr)
    finally:
        engine.close()
    return row


def _speedup_summary(rows: list[dict], baseline_path: str) -> list[str]:
    """Per sharing class: median and tail percentiles of baseline/current."""
    with open(baseline_path, newline="", encoding="utf-8") as fh:
        baseline = {r["name"]: r for r in csv.DictReader(
            line for line in fh if not line.startswith("#"))}
    by_class: dict[str, list[float]] = {}
    for row in rows:
        base = baseline.get(row["name"])
        if not base or base.get("status") != "ok" or row["status"] != "ok":
            continue
        cur = float(row["seconds"])
        if cur <= 0.0:
            continue
        cls = row["sharing"] or base.get("sharing") or "all"
        by_class.setdefault(cls, []).append(float(base["seconds"]) / cur)
    lines = []
    for cls in sorted(by_class):
        s = np.array(by_class[cls])
        lines.append(
            f"# speedup {cls} count={len(s)} "
            f"median={np.median(s):.2f} p90={np.percentile(s, 90):.2f} "
            f"p95={np.percentile(s, 95):.2f} p99={np.percentile(s, 99):.2f}")
    return lines


def cmd_bench(directory: str, mode: str, cfg: RunConfig,
              baseline: str | None = None) -> int:
    if not os.path.isdir(directory):
        print(f"error: not a directory: {directory}", file=sys.stderr)
        return EXIT_ERROR
    writer = csv.writer(sys.stdout)
    writer.writerow(BENCH_HEADER)
    rows = []
    for name, paths in _bench_instances(directory, mode):
        row = _run_bench_instance(name, paths, mode, cfg)
        rows.append(row)
        writer.writerow([row[k] for k in BENCH_HEADER])
        sys.stdout.flush()
    if baseline:
        for line in _speedup_summary(rows, baseline):
            print(line)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="evdd",
        description="Decision-diagram simulation and equivalence checking "
                    "of OpenQASM 2.0 circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("sim", help="simulate a circuit")
    p_sim.add_argument("file")
    _add_shared_flags(p_sim)

    p_eq = sub.add_parser("eqcheck", help="check two circuits for "
                                          "equivalence up to a factor")
    p_eq.add_argument("file_u")
    p_eq.add_argument("file_v")
    p_eq.add_argument("--algorithm", choices=["alternating", "pauli"],
                      default="alternating")
    _add_shared_flags(p_eq)

    p_bench = sub.add_parser("bench", help="sweep a directory of circuits")
    p_bench.add_argument("directory")
    p_bench.add_argument("--mode", choices=["sim", "eqcheck"], default="sim")
    p_bench.add_argument("--baseline", default=None, metavar="CSV")
    _add_shared_flags(p_bench)

    p_plot = sub.add_parser("plot", help="render figures from bench CSV")
    p_plot.add_argument("csv_file")
    p_plot.add_argument("--out-dir", default=".")
    p_plot.add_argument("--baseline", default=None, metavar="CSV")

    args = parser.parse_args(argv)
    try:
        if args.command == "sim":
            return cmd_sim(args.file, _config_from(args))
        if args.command == "eqcheck":
            return cmd_eqcheck(args.file_u, args.file_v, args.algorithm,
                               _config_from(args))
        if args.command == "bench":
            return cmd_bench(args.directory, args.mode, _config_from(args),
                             args.baseline)
        if args.command == "plot":
            from .plots import render_bench_figures
            written = render_bench_figures(args.csv_file, args.out_dir,
                                           args.baseline)
            for path in written:
                print(path)
            return EXIT_OK
    except EvddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
