"""Monte Carlo drivers and CSV writers for the three experiments.

* tradeoff sweep: single-link throughput versus beamwidth product, one curve
  per pilot ratio;
* contour: single-link throughput over the (transmit, receive) beamwidth
  plane plus the best receive beam for every transmit beam;
* comparison: mean network throughput of the four schedulers versus the
  number of links.

Every random topology is drawn from ``SeedSequence([seed, n_links, index])``
so a run's records do not depend on evaluation order or worker count.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .config import SimConfig
from .geometry import generate_topology
from .scheduler import run_all
from .singlelink import SingleLinkProblem, exact_throughput, optimal_beamwidth_product, simplified_throughput

log = logging.getLogger(__name__)

SCHEDULER_ORDER = ("oracle", "under", "over", "single")
SWEEP_HEADER = ("phi", "tp_ratio", "throughput", "phi_star")
CONTOUR_HEADER = ("phi_t_deg", "phi_r_deg", "throughput")
OPTIMUM_HEADER = ("phi_t_deg", "phi_r_deg", "product_deg2", "throughput")
COMPARE_HEADER = ("n_links", "scheduler", "mean_R", "stderr", "gain_pct")
RUNS_HEADER = ("seed", "n_links", "topology", "scheduler", "R")


def fmt(x) -> str:
    """Locale-independent, 9 significant digits."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".9g")


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def link_problem(cfg: SimConfig, pilot_ratio: float | None = None, side_lobe: float | None = None) -> SingleLinkProblem:
    """Single link of length ``cfg.link_distance`` under the configured radio (median gain, no shadowing)."""
    g = 10.0 ** (-cfg.path_loss.loss_db(cfg.link_distance) / 10.0)
    return SingleLinkProblem(g * cfg.p_max / cfg.noise, cfg.side_lobe if side_lobe is None else side_lobe,
                             cfg.sector_tx, cfg.sector_rx, cfg.pilot_ratio if pilot_ratio is None else pilot_ratio)


def run_tradeoff_sweep(cfg: SimConfig) -> list[tuple[float, float, float, float]]:
    """Rows ``(phi, tp_ratio, throughput, phi_star)`` over a log grid per pilot ratio."""
    rows = []
    for ratio in cfg.sweep_ratios:
        prob = link_problem(cfg, ratio)
        lo, hi = prob.interval
        grid = np.geomspace(lo, hi, cfg.sweep_points)
        grid[0], grid[-1] = lo, hi
        values = simplified_throughput(grid, prob)
        star = optimal_beamwidth_product(prob).phi
        rows.extend((float(p), ratio, float(v), star) for p, v in zip(grid, values))
    return rows


def _contour_axes(prob: SingleLinkProblem, points: int) -> tuple[np.ndarray, np.ndarray]:
    # narrowest beam that can still pair with a full-sector beam on the other side
    t = np.linspace(prob.c1 / prob.sector_rx, prob.sector_tx, points)
    r = np.linspace(prob.c1 / prob.sector_tx, prob.sector_rx, points)
    return t, r


def _solo_value(a: float, b: float, prob: SingleLinkProblem) -> float:
    if a * b < prob.c1 * (1 - 1e-12):
        return 0.0
    return exact_throughput(a, b, prob, continuous=True)


def best_receive_beam(phi_t: float, prob: SingleLinkProblem) -> tuple[float, float]:
    """Receive beamwidth maximising solo throughput for a fixed transmit beamwidth."""
    lo = max(prob.c1 / phi_t, 1e-12)
    hi = prob.sector_rx
    if lo >= hi:
        return hi, _solo_value(phi_t, hi, prob)
    res = minimize_scalar(lambda b: -exact_throughput(phi_t, b, prob, continuous=True),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * hi})
    cands = [(float(res.x), -float(res.fun)), (hi, _solo_value(phi_t, hi, prob))]
    return max(cands, key=lambda c: c[1])


@dataclass
class ContourResult:
    grid: list[tuple[float, float, float]]
    optimum: list[tuple[float, float, float, float]]


def run_contour(cfg: SimConfig) -> ContourResult:
    """Throughput over the beamwidth plane (degrees) and the optimal level curve."""
    prob = link_problem(cfg)
    t_axis, r_axis = _contour_axes(prob, cfg.contour_points)
    grid = [(math.degrees(a), math.degrees(b), _solo_value(a, b, prob)) for a in t_axis for b in r_axis]
    optimum = []
    for a in t_axis:
        b, val = best_receive_beam(float(a), prob)
        optimum.append((math.degrees(a), math.degrees(b), math.degrees(a) * math.degrees(b), val))
    return ContourResult(grid, optimum)


@dataclass
class ExperimentResult:
    """Per-scheduler summary rows and the raw per-topology records."""

    summary: list[tuple[int, str, float, float, float]]
    records: list[tuple[int, int, int, str, float]]

    def mean(self, n_links: int, scheduler: str) -> float:
        for n, s, m, _, _ in self.summary:
            if n == n_links and s == scheduler:
                return m
        raise KeyError((n_links, scheduler))

    def values(self, n_links: int, scheduler: str) -> np.ndarray:
        return np.array([r for _, n, _, s, r in self.records if n == n_links and s == scheduler])


def topology_seed(seed: int, n_links: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, n_links, index])


def _one_topology(cfg: SimConfig, n_links: int, index: int, with_oracle: bool) -> list[tuple[int, int, int, str, float]]:
    topo = generate_topology(n_links, cfg.area_side, cfg.min_separation,
                             np.random.default_rng(topology_seed(cfg.seed, n_links, index)),
                             cfg.sector_tx, cfg.sector_rx, cfg.path_loss)
    out = run_all(topo, cfg.radio(), cfg.oracle_resolution, oracle=with_oracle)
    return [(cfg.seed, n_links, index, name, float(out[name].throughput))
            for name in SCHEDULER_ORDER if name in out]


def _one_topology_star(args):
    return _one_topology(*args)


def run_comparison(cfg: SimConfig) -> ExperimentResult:
    tasks = []
    for n in cfg.n_links:
        with_oracle = n <= cfg.oracle_max_links
        if not with_oracle:
            warnings.warn(f"oracle skipped for N={n}: above oracle_max_links={cfg.oracle_max_links}",
                          RuntimeWarning, stacklevel=2)
        tasks.extend((cfg, n, k, with_oracle) for k in range(cfg.n_topologies))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_one_topology_star, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        chunks = [_one_topology_star(t) for t in tasks]
    records = sorted((r for chunk in chunks for r in chunk),
                     key=lambda r: (r[1], r[2], SCHEDULER_ORDER.index(r[3])))
    summary = []
    for n in cfg.n_links:
        by_name = {name: np.array([r[4] for r in records if r[1] == n and r[3] == name])
                   for name in SCHEDULER_ORDER}
        base = by_name["single"].mean()
        for name in SCHEDULER_ORDER:
            vals = by_name[name]
            if vals.size == 0:
                continue
            mean = float(vals.mean())
            stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
            gain = 100.0 * (mean / base - 1.0) if base > 0 else float("nan")
            summary.append((n, name, mean, stderr, gain))
        log.info("N=%d done", n)
    return ExperimentResult(summary, records)


def write_sweep(rows, out_dir) -> Path:
    return write_csv(Path(out_dir) / "tradeoff.csv", SWEEP_HEADER, rows)


def write_contour(res: ContourResult, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    return (write_csv(out_dir / "contour.csv", CONTOUR_HEADER, res.grid),
            write_csv(out_dir / "contour_optimum.csv", OPTIMUM_HEADER, res.optimum))


def write_comparison(res: ExperimentResult, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    return (write_csv(out_dir / "compare.csv", COMPARE_HEADER, res.summary),
            write_csv(out_dir / "compare_runs.csv", RUNS_HEADER, res.records))
