"""Command line entry point: ``mmwsched {sweep,contour,compare,topo-gen,schedule}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import SimConfig, load_config
from .experiments import (run_comparison, run_contour, run_tradeoff_sweep, write_comparison, write_contour,
                          write_sweep)
from .geometry import generate_topology, load_topology
from .scheduler import SCHEDULERS, solo_solutions

log = logging.getLogger("mmwsched")

SCHEDULER_CHOICES = ("oracle", "over", "under", "single")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--seed", type=int, help="base random seed (overrides config)")
    common.add_argument("--out-dir", type=Path, help="output directory (overrides config)")
    common.add_argument("--format", choices=("csv",), default="csv", help="output format")
    common.add_argument("--jobs", type=int, help="worker processes for compare")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="mmwsched", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="single-link throughput vs beamwidth product")
    sub.add_parser("contour", parents=[common], help="single-link throughput over (phi_t, phi_r)")
    cmp_ = sub.add_parser("compare", parents=[common], help="scheduler comparison vs number of links")
    cmp_.add_argument("--n-topologies", type=int)
    topo = sub.add_parser("topo-gen", parents=[common], help="write a random topology file")
    topo.add_argument("--n-links", type=int, default=10)
    topo.add_argument("-o", "--output", help="output file ('-' for stdout); default <out-dir>/topology.txt")
    sched = sub.add_parser("schedule", parents=[common], help="schedule a topology file")
    sched.add_argument("topology", type=Path)
    sched.add_argument("--scheduler", choices=SCHEDULER_CHOICES, default="under")
    sched.add_argument("-o", "--output", help="output file; default stdout")
    return p


def _config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    overrides = {"seed": args.seed, "jobs": args.jobs,
                 "output_dir": str(args.out_dir) if args.out_dir else None}
    if getattr(args, "n_topologies", None) is not None:
        overrides["n_topologies"] = args.n_topologies
    return cfg.with_overrides(**overrides)


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="ascii")


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config(args)
    out = Path(cfg.output_dir)
    if args.command == "sweep":
        print(write_sweep(run_tradeoff_sweep(cfg), out))
    elif args.command == "contour":
        for path in write_contour(run_contour(cfg), out):
            print(path)
    elif args.command == "compare":
        for path in write_comparison(run_comparison(cfg), out):
            print(path)
    elif args.command == "topo-gen":
        seed = cfg.seed
        topo = generate_topology(args.n_links, cfg.area_side, cfg.min_separation, seed,
                                 cfg.sector_tx, cfg.sector_rx, cfg.path_loss)
        _emit(topo.dumps(), args.output or str(out / "topology.txt"))
    elif args.command == "schedule":
        topo = load_topology(args.topology, sector_tx=cfg.sector_tx, sector_rx=cfg.sector_rx,
                             path_loss=cfg.path_loss)
        radio = cfg.radio()
        solo = solo_solutions(topo, radio)
        if args.scheduler == "oracle":
            sched = SCHEDULERS["oracle"](topo, radio, cfg.oracle_resolution, solo, cap=cfg.oracle_max_links)
        else:
            sched = SCHEDULERS[args.scheduler](topo, radio, solo)
        _emit(sched.dumps(), args.output)
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"mmwsched: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
