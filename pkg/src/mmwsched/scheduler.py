"""Concurrent transmission schedulers.

Four strategies share the same inputs (a :class:`Topology` and a
:class:`Radio`) and return a :class:`Schedule` whose ``throughput`` is
always evaluated with full interference:

* ``overestimation`` - conservative conflict graph from sector-level
  measurements, then the best maximal independent set;
* ``underestimation`` - every link on, each tuned as if alone;
* ``single`` - only the link with the best sector-level SNR;
* ``oracle`` - exhaustive activation search with per-link beamwidth
  coordinate ascent under the true SINR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .antenna import directivity_gain, main_lobe_gain, pilot_count
from .geometry import Topology
from .metrics import Radio, Schedule, link_params
from .singlelink import LinkBeams, SingleLinkProblem, solve_link, split_product

MIS_CAP = 24
ORACLE_CAP = 12


@dataclass(frozen=True, eq=False)
class SectorMeasurements:
    """Sector-beam, full-power measurements from the orthogonal-channel round.

    ``inr[j, i]`` is the interference-to-noise ratio caused by transmitter j
    at receiver i; the diagonal is zero.
    """

    snr: np.ndarray
    inr: np.ndarray

    def __post_init__(self):
        n = len(self.snr)
        if self.inr.shape != (n, n):
            raise ValueError("inr must be an N x N matrix")
        if np.any(self.snr < 0) or np.any(self.inr < 0):
            raise ValueError("measurements must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.snr)


def sector_measurements(topology: Topology, p_max: float, noise: float, side_lobe: float) -> SectorMeasurements:
    """Measure every link and every cross pair with sector-wide beams at ``p_max``.

    Each link has its own channel during this round, so no measurement sees
    interference.
    """
    g_t = directivity_gain(topology.theta_t, topology.sector_tx[:, None], side_lobe)
    g_r = directivity_gain(topology.theta_r, topology.sector_rx[None, :], side_lobe)
    ratio = p_max * g_t * topology.channel_gain * g_r / noise
    snr = np.diag(ratio).copy()
    inr = ratio.copy()
    np.fill_diagonal(inr, 0.0)
    return SectorMeasurements(snr, inr)


@dataclass(frozen=True, eq=False)
class ConflictGraph:
    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=bool)
        if a.shape != (self.n, self.n):
            raise ValueError("adjacency must be n x n")
        if np.any(np.diag(a)) or np.any(a != a.T):
            raise ValueError("adjacency must be symmetric without self-loops")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @classmethod
    def from_edges(cls, n: int, edges) -> "ConflictGraph":
        a = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i != j:
                a[i, j] = a[j, i] = True
        return cls(n, a)

    @property
    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def neighbours(self, v: int) -> set[int]:
        return set(np.flatnonzero(self.adjacency[v]).tolist())

    def is_independent(self, vertices) -> bool:
        v = list(vertices)
        return not np.any(self.adjacency[np.ix_(v, v)])


def build_conflict_graph(meas: SectorMeasurements) -> ConflictGraph:
    """Links i and j stay unconnected only if each tolerates the other.

    Independence needs ``sqrt(SNR) >= INR`` at both receivers for the
    interference coming from the other transmitter, and, to stay on the safe
    side, also for the reverse-direction measurement.
    """
    root = np.sqrt(meas.snr)
    inr = meas.inr
    ok = ((root[:, None] >= inr.T) & (root[:, None] >= inr)
          & (root[None, :] >= inr) & (root[None, :] >= inr.T))
    adj = ~ok
    np.fill_diagonal(adj, False)
    return ConflictGraph(meas.n, adj)


def maximal_independent_sets(graph: ConflictGraph, cap: int = MIS_CAP) -> list[tuple[int, ...]]:
    """All maximal independent sets, sorted internally and lexicographically.

    Enumerates maximal cliques of the complement graph with Bron-Kerbosch and
    Tomita pivoting.
    """
    n = graph.n
    if n > cap:
        raise ValueError(f"{n} vertices exceeds the independent-set enumeration cap of {cap}")
    if n == 0:
        return []
    free = ~graph.adjacency
    np.fill_diagonal(free, False)
    nbr = [frozenset(np.flatnonzero(free[v]).tolist()) for v in range(n)]
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: (len(p & nbr[u]), -u))
        for v in sorted(p - nbr[pivot]):
            expand(r + [v], p & nbr[v], x & nbr[v])
            p.discard(v)
            x.add(v)

    expand([], set(range(n)), set())
    return sorted(out)


def link_problem(topology: Topology, link: int, radio: Radio) -> SingleLinkProblem:
    params = link_params(topology, link, radio.timing)
    return SingleLinkProblem.from_link(params, float(topology.channel_gain[link, link]), radio.p_max,
                                       radio.noise, radio.side_lobe)


def solo_solutions(topology: Topology, radio: Radio) -> list[LinkBeams]:
    """Interference-free optimum of every link at ``p_max``."""
    return [solve_link(link_problem(topology, i, radio), continuous=radio.continuous)
            for i in range(topology.n_links)]


def _schedule_from_solo(ids, solo: list[LinkBeams], radio: Radio, topology: Topology, scheme: str,
                        estimate: float | None = None, **info) -> Schedule:
    sched = Schedule.build([(i, solo[i].phi_tx, solo[i].phi_rx, radio.p_max) for i in ids],
                           estimate=estimate, scheme=scheme, info=info)
    return sched.with_throughput(radio.throughput(sched, topology))


def _better(value: float, ids: tuple[int, ...], best_value: float, best_ids: tuple[int, ...] | None) -> bool:
    """Larger value wins; ties go to fewer links, then to the lexicographically smaller set."""
    if best_ids is None or value > best_value:
        return True
    if value < best_value:
        return False
    return (len(ids), ids) < (len(best_ids), best_ids)


def schedule_overestimation(topology: Topology, radio: Radio, solo: list[LinkBeams] | None = None,
                            cap: int = MIS_CAP) -> Schedule:
    """Best maximal independent set of the conservative conflict graph.

    Links inside an independent set are assumed not to interfere, so each is
    scored with its solo optimum and the set score is the plain sum.
    """
    solo = solo if solo is not None else solo_solutions(topology, radio)
    meas = sector_measurements(topology, radio.p_max, radio.noise, radio.side_lobe)
    graph = build_conflict_graph(meas)
    best_ids, best_val = None, -math.inf
    for ids in maximal_independent_sets(graph, cap):
        val = float(sum(solo[i].throughput for i in ids))
        if _better(val, ids, best_val, best_ids):
            best_ids, best_val = ids, val
    return _schedule_from_solo(best_ids, solo, radio, topology, "over", best_val, graph=graph)


def schedule_underestimation(topology: Topology, radio: Radio, solo: list[LinkBeams] | None = None) -> Schedule:
    """Every link active at ``p_max`` with its solo-optimal beams."""
    solo = solo if solo is not None else solo_solutions(topology, radio)
    estimate = float(sum(s.throughput for s in solo))
    return _schedule_from_solo(range(topology.n_links), solo, radio, topology, "under", estimate)


def schedule_single_link(topology: Topology, radio: Radio, solo: list[LinkBeams] | None = None) -> Schedule:
    """Only the link with the highest sector-level SNR transmits."""
    if topology.n_links < 1:
        raise ValueError("topology has no links")
    solo = solo if solo is not None else solo_solutions(topology, radio)
    meas = sector_measurements(topology, radio.p_max, radio.noise, radio.side_lobe)
    best = int(np.argmax(meas.snr))  # first maximum, i.e. lowest id on ties
    return _schedule_from_solo([best], solo, radio, topology, "single", solo[best].throughput)


def _oracle_candidates(topology: Topology, link: int, radio: Radio, solo: LinkBeams,
                       resolution: int) -> list[tuple[float, float]]:
    """Beam pairs the oracle may assign to ``link``: its solo optimum first, then a log grid."""
    prob = link_problem(topology, link, radio)
    lo, hi = prob.interval
    targets = np.geomspace(lo, hi, resolution)
    cands = [(solo.phi_tx, solo.phi_rx)]
    if radio.continuous:
        # the exact lower end leaves no time for data; nudge off it
        targets[0] = lo * (1 + 1e-9)
        cands += [split_product(float(t), prob.sector_tx, prob.sector_rx) for t in targets]
    else:
        # off-lattice beams are dominated under whole-pilot alignment; snap
        max_pilots = 1.0 / prob.pilot_ratio
        for t in targets:
            a, b = split_product(float(t), prob.sector_tx, prob.sector_rx)
            mt, mr = pilot_count(prob.sector_tx, a), pilot_count(prob.sector_rx, b)
            while mt * mr >= max_pilots * (1 - 1e-12) and (mt > 1 or mr > 1):
                if mt >= mr:
                    mt -= 1
                else:
                    mr -= 1
            cands.append((prob.sector_tx / mt, prob.sector_rx / mr))
    seen, out = set(), []
    for c in cands:
        key = (round(c[0], 12), round(c[1], 12))
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


class _OracleTables:
    """Gains and time fractions for every (link, candidate) pair, padded to a common width."""

    def __init__(self, topology: Topology, radio: Radio, cands: list[list[tuple[float, float]]]):
        n = topology.n_links
        width = max(len(c) for c in cands)
        self.count = np.array([len(c) for c in cands])
        phi_t = np.empty((n, width))
        phi_r = np.empty((n, width))
        frac = np.full((n, width), -1.0)
        for i, cs in enumerate(cands):
            pad = cs + [cs[0]] * (width - len(cs))
            phi_t[i], phi_r[i] = np.array(pad).T
            params = link_params(topology, i, radio.timing)
            for c, (a, b) in enumerate(cs):
                if radio.continuous:
                    pilots = (params.sector_tx / a) * (params.sector_rx / b)
                else:
                    pilots = pilot_count(params.sector_tx, a) * pilot_count(params.sector_rx, b)
                frac[i, c] = max(0.0, 1.0 - pilots * params.pilot_ratio)
        z = radio.side_lobe
        # tx[i, j, c]: gain of transmitter i toward receiver j with candidate c
        self.tx = directivity_gain(topology.theta_t[:, :, None], phi_t[:, None, :], z)
        # rx[i, j, c]: gain of receiver j toward transmitter i with j's candidate c
        self.rx = directivity_gain(topology.theta_r[:, :, None], phi_r[None, :, :], z)
        self.gc = topology.channel_gain * radio.p_max
        self.frac = frac
        self.phi_t, self.phi_r = phi_t, phi_r
        self.noise = radio.noise

    def power_matrix(self, ids: np.ndarray, choice: np.ndarray) -> np.ndarray:
        gt = self.tx[ids[:, None], ids[None, :], choice[:, None]]
        gr = self.rx[ids[:, None], ids[None, :], choice[None, :]]
        return gt * self.gc[np.ix_(ids, ids)] * gr

    def objective(self, ids: np.ndarray, choice: np.ndarray, pm: np.ndarray) -> float:
        signal = np.diag(pm)
        sinr = signal / (pm.sum(axis=0) - signal + self.noise)
        return float(np.sum(self.frac[ids, choice] * np.log2(1.0 + sinr)))

    def ascend(self, ids: np.ndarray, choice: np.ndarray, max_passes: int = 100) -> tuple[float, np.ndarray]:
        """Block-coordinate ascent over each link's candidates until no move helps."""
        choice = choice.copy()
        pm = self.power_matrix(ids, choice)
        best = self.objective(ids, choice, pm)
        k = len(ids)
        gc = self.gc[np.ix_(ids, ids)]
        for _ in range(max_passes):
            improved = False
            for a in range(k):
                link = ids[a]
                m = self.count[link]
                # candidate matrices: replace row a (as transmitter) and column a (as receiver)
                stack = np.broadcast_to(pm, (m, k, k)).copy()
                row = self.tx[link, ids, :m].T * gc[a][None, :] * self.rx[link, ids, choice][None, :]
                col = self.tx[ids, link, choice][None, :] * gc[:, a][None, :] * self.rx[ids, link, :m].T
                stack[:, a, :] = row
                stack[:, :, a] = col
                stack[:, a, a] = self.tx[link, link, :m] * gc[a, a] * self.rx[link, link, :m]
                signal = np.diagonal(stack, axis1=1, axis2=2)
                sinr = signal / (stack.sum(axis=1) - signal + self.noise)
                frac = np.broadcast_to(self.frac[ids, choice], (m, k)).copy()
                frac[:, a] = self.frac[link, :m]
                values = np.sum(frac * np.log2(1.0 + sinr), axis=1)
                c = int(np.argmax(values))
                if values[c] > best * (1 + 1e-12) + 1e-15 and c != choice[a]:
                    choice[a] = c
                    pm = stack[c]
                    best = float(values[c])
                    improved = True
            if not improved:
                break
        return best, choice


def schedule_oracle(topology: Topology, radio: Radio, resolution: int = 16,
                    solo: list[LinkBeams] | None = None, protocols: list[Schedule] | None = None,
                    cap: int = ORACLE_CAP) -> Schedule:
    """Approximate maximiser of the true-SINR network throughput.

    Every nonempty activation subset is tried; active links use ``p_max``
    and their beams are tuned by coordinate ascent on a grid of
    ``resolution`` beamwidth products (starting from the solo optimum).
    The three protocol schedules are added to the candidate pool, so the
    result never falls below any of them.
    """
    n = topology.n_links
    if n > cap:
        raise ValueError(f"{n} links exceeds the oracle cap of {cap}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    solo = solo if solo is not None else solo_solutions(topology, radio)
    cands = [_oracle_candidates(topology, i, radio, solo[i], resolution) for i in range(n)]
    tables = _OracleTables(topology, radio, cands)

    best_ids, best_val, best_choice = None, -math.inf, None
    for size in range(1, n + 1):
        for ids in combinations(range(n), size):
            arr = np.array(ids)
            val, choice = tables.ascend(arr, np.zeros(size, dtype=int))
            if _better(val, ids, best_val, best_ids):
                best_ids, best_val, best_choice = ids, val, choice

    entries = [(i, tables.phi_t[i, c], tables.phi_r[i, c], radio.p_max) for i, c in zip(best_ids, best_choice)]
    sched = Schedule.build(entries, scheme="oracle", estimate=best_val)
    sched = sched.with_throughput(radio.throughput(sched, topology))
    if protocols is None:
        protocols = [schedule_overestimation(topology, radio, solo),
                     schedule_underestimation(topology, radio, solo),
                     schedule_single_link(topology, radio, solo)]
    for p in protocols:
        if p.throughput > sched.throughput:
            sched = Schedule(p.active, p.phi_tx, p.phi_rx, p.power, p.throughput, p.throughput,
                             "oracle", {"from": p.scheme})
    return sched


SCHEDULERS = {
    "over": schedule_overestimation,
    "under": schedule_underestimation,
    "single": schedule_single_link,
    "oracle": schedule_oracle,
}


def run_all(topology: Topology, radio: Radio, resolution: int = 16, oracle: bool = True) -> dict[str, Schedule]:
    """All four schedules for one topology, sharing the solo optima."""
    solo = solo_solutions(topology, radio)
    out = {
        "over": schedule_overestimation(topology, radio, solo),
        "under": schedule_underestimation(topology, radio, solo),
        "single": schedule_single_link(topology, radio, solo),
    }
    if oracle:
        out["oracle"] = schedule_oracle(topology, radio, resolution, solo,
                                        [out["over"], out["under"], out["single"]])
    return out
