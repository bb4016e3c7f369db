"""Command-line entry point: ``csflock run|sweep|certify|graphs check``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .errors import ConfigError


def _dwell_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"dwell list must be integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("dwell values must be positive step counts")
    return values


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= harness.MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="csflock",
        description="Cucker-Smale flocking under rooted leadership with alternating leaders.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", type=Path, help="experiment configuration file")
    common.add_argument("--seed", type=_seed, help="override the [init] seed")
    common.add_argument("--steps", type=int, help="override the number of steps")
    common.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    common.add_argument("--threshold", type=float, help="near-alignment threshold on |vhat|_inf")

    sub.add_parser("run", parents=[common], help="simulate and write trajectory, metrics, certificate")
    sweep = sub.add_parser("sweep", parents=[common], help="rerun a cyclic signal with several dwell times")
    sweep.add_argument("--dwell", type=_dwell_list, required=True, help="comma-separated dwell steps")
    sub.add_parser("certify", parents=[common], help="evaluate the flocking certificate only")

    graphs = sub.add_parser("graphs", help="graph utilities")
    gsub = graphs.add_subparsers(dest="graphs_command", required=True)
    check = gsub.add_parser("check", help="report rootedness of every graph in a graph file")
    check.add_argument("file", type=Path)
    return ap


def _load(args) -> harness.ExperimentConfig:
    config = harness.load_config(args.config, out_dir=args.out_dir)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if args.steps is not None:
        if args.steps < 1:
            raise ConfigError([(None, "--steps must be at least 1")])
        config = replace(config, steps=args.steps)
    if args.threshold is not None:
        if not args.threshold > 0:
            raise ConfigError([(None, "--threshold must be positive")])
        config = replace(config, threshold=args.threshold)
    return config


def _cmd_run(args) -> int:
    config = _load(args)
    result = harness.run(config)
    harness.write_outputs(result, config, config.outputs)
    m = result.metrics
    print(f"wrote {config.outputs.trajectory}")
    print(f"sup|xhat| = {m['sup_xhat']:.6g}  final|vhat|_inf = {m['final_vhat_inf']:.3e}  "
          f"rate = {m['fitted_rate']:.4g}/step")
    for msg in m["warnings"]:
        print(f"warning: {msg}", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    rows = harness.dwell_sweep(config, args.dwell)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / "sweep.csv"
    harness.write_sweep_csv(path, rows)
    print(f"wrote {path}")
    for r in rows:
        print(f"dwell {r.dwell:>4}: |vinf - v1(0)| = {r.distances[0]:.6g}  "
              f"aligned from step {r.alignment_step}")
    return 0


def _cmd_certify(args) -> int:
    config = replace(_load(args), steps=1)
    p = config.params
    if not p.satisfies_step_condition:
        raise ConfigError([(None, f"certificate refused: h = {p.h} violates h < 1/(N+1) = {p.h_max:.6g}")])
    config = replace(config, mode=harness.CERTIFICATE)
    result = harness.run(config)
    record = harness.certificate_record(result, config)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_keyvalue(config.outputs.certificate, record)
    sys.stdout.write(harness.format_keyvalue(record))
    return 0


def _cmd_graphs_check(args) -> int:
    gf = harness.parse_graph_file(args.file.read_text(encoding="utf-8"))
    rows = harness.check_graphs(gf.graphs)
    ok = True
    for r in rows:
        lead = f"leader {r['leader']}" if r["rooted_leadership"] else f"no rooted leadership ({r['reason']})"
        print(f"graph {r['graph']}: rooted={r['rooted']} roots={r['roots']} "
              f"strong_roots={r['strong_roots']} {lead}")
        ok &= r["rooted_leadership"]
    if gf.schedule is not None:
        print(f"signal: {gf.schedule}")
    return 0 if ok else 1


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep, "certify": _cmd_certify}
    try:
        if args.command == "graphs":
            return _cmd_graphs_check(args)
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
