"""SINR and slot-normalised throughput of a candidate schedule.

Interference is treated as Gaussian noise. Throughput is reported in
bits per slot per hertz: ``(1 - tau/T) * log2(1 + SINR)``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import AlignmentParams, alignment_time, directivity_gain, feasible_beamwidths
from .geometry import Topology


@dataclass(frozen=True)
class Schedule:
    """Active links with their beamwidths (rad) and powers (W).

    ``phi_tx``, ``phi_rx`` and ``power`` are aligned with ``active``, which is
    kept sorted. ``throughput`` is the network throughput under the true
    interference model when the producer evaluated it; ``estimate`` is the
    producer's own objective value (e.g. the interference-free sum).
    """

    active: tuple[int, ...]
    phi_tx: tuple[float, ...]
    phi_rx: tuple[float, ...]
    power: tuple[float, ...]
    throughput: float | None = None
    estimate: float | None = None
    scheme: str = ""
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.active)
        if not (len(self.phi_tx) == len(self.phi_rx) == len(self.power) == n):
            raise ValueError("per-link vectors must match the active set")
        if len(set(self.active)) != n:
            raise ValueError("duplicate link ids in schedule")
        if list(self.active) != sorted(self.active):
            order = np.argsort(self.active, kind="stable")
            for name in ("active", "phi_tx", "phi_rx", "power"):
                vals = getattr(self, name)
                object.__setattr__(self, name, tuple(vals[k] for k in order))

    @classmethod
    def build(cls, entries, **kwargs) -> "Schedule":
        """From an iterable of ``(id, phi_tx, phi_rx, power)``."""
        entries = sorted(entries)
        if not entries:
            return cls((), (), (), (), **kwargs)
        ids, pt, pr, pw = zip(*entries)
        return cls(tuple(int(i) for i in ids), tuple(map(float, pt)), tuple(map(float, pr)),
                   tuple(map(float, pw)), **kwargs)

    @classmethod
    def empty(cls, **kwargs) -> "Schedule":
        return cls((), (), (), (), **kwargs)

    def __len__(self) -> int:
        return len(self.active)

    def __contains__(self, link: int) -> bool:
        return link in self.active

    def index(self, link: int) -> int:
        try:
            return self.active.index(link)
        except ValueError:
            raise KeyError(f"link {link} is not active in this schedule") from None

    def with_throughput(self, value: float) -> "Schedule":
        return Schedule(self.active, self.phi_tx, self.phi_rx, self.power, value,
                        self.estimate, self.scheme, self.info)

    def dumps(self) -> str:
        r = self.throughput if self.throughput is not None else float("nan")
        out = io.StringIO()
        out.write(f"R={r:.9g}\n")
        for i, a, b, p in zip(self.active, self.phi_tx, self.phi_rx, self.power):
            out.write(f"{i} {a:.9g} {b:.9g} {p:.9g}\n")
        return out.getvalue()


def loads_schedule(text: str) -> Schedule:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("R="):
        raise ValueError("schedule text must start with an 'R=<value>' header")
    r = float(lines[0][2:])
    entries = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise ValueError(f"expected 'id phi_t phi_r power', got {ln!r}")
        entries.append((int(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])))
    return Schedule.build(entries, throughput=None if math.isnan(r) else r)


def link_params(topology: Topology, link: int, timing: AlignmentParams) -> AlignmentParams:
    """Alignment parameters of one link: its own sectors, the shared pilot timing."""
    l = topology.links[link]
    return AlignmentParams(l.sector_tx, l.sector_rx, timing.pilot_time, timing.slot_time)


def received_power(schedule: Schedule, topology: Topology, side_lobe: float) -> np.ndarray:
    """``P[a, b] = p_k g^t_{k,i} g^c_{k,i} g^r_{k,i}`` for active links ``k = active[a]``, ``i = active[b]``."""
    ids = np.asarray(schedule.active, dtype=int)
    if ids.size == 0:
        return np.zeros((0, 0))
    idx = np.ix_(ids, ids)
    phi_t = np.asarray(schedule.phi_tx)
    phi_r = np.asarray(schedule.phi_rx)
    g_t = directivity_gain(topology.theta_t[idx], phi_t[:, None], side_lobe)
    g_r = directivity_gain(topology.theta_r[idx], phi_r[None, :], side_lobe)
    return np.asarray(schedule.power)[:, None] * g_t * topology.channel_gain[idx] * g_r


def sinr_vector(schedule: Schedule, topology: Topology, noise: float, side_lobe: float) -> np.ndarray:
    """SINR of every active link, in ``schedule.active`` order."""
    rp = received_power(schedule, topology, side_lobe)
    if rp.size == 0:
        return np.zeros(0)
    signal = np.diag(rp)
    interference = rp.sum(axis=0) - signal
    return signal / (interference + noise)


def sinr(link: int, schedule: Schedule, topology: Topology, noise: float, side_lobe: float) -> float:
    return float(sinr_vector(schedule, topology, noise, side_lobe)[schedule.index(link)])


def time_fraction(params: AlignmentParams, phi_tx: float, phi_rx: float, continuous: bool = False) -> float:
    """Share of the slot left for data after alignment; zero if alignment overruns."""
    tau = alignment_time(params, phi_tx, phi_rx, continuous=continuous)
    return max(0.0, 1.0 - tau / params.slot_time)


def rate(fraction, sinr_value):
    return fraction * np.log2(1.0 + np.asarray(sinr_value))


def throughput_vector(schedule: Schedule, topology: Topology, timing: AlignmentParams, noise: float,
                      side_lobe: float, continuous: bool = False, check: bool = True) -> np.ndarray:
    """Per-link throughput, in ``schedule.active`` order."""
    if not schedule.active:
        return np.zeros(0)
    fractions = np.empty(len(schedule))
    for k, (i, a, b) in enumerate(zip(schedule.active, schedule.phi_tx, schedule.phi_rx)):
        params = link_params(topology, i, timing)
        if check and not feasible_beamwidths(params, a, b):
            raise ValueError(f"link {i}: beamwidths ({a:.4g}, {b:.4g}) are infeasible")
        fractions[k] = time_fraction(params, a, b, continuous)
    return rate(fractions, sinr_vector(schedule, topology, noise, side_lobe))


def link_throughput(link: int, schedule: Schedule, topology: Topology, timing: AlignmentParams,
                    noise: float, side_lobe: float, continuous: bool = False) -> float:
    values = throughput_vector(schedule, topology, timing, noise, side_lobe, continuous)
    return float(values[schedule.index(link)])


def network_throughput(schedule: Schedule, topology: Topology, timing: AlignmentParams, noise: float,
                       side_lobe: float, continuous: bool = False) -> float:
    """Sum of link throughputs over the active set (0 for an empty schedule)."""
    return float(throughput_vector(schedule, topology, timing, noise, side_lobe, continuous).sum())


def solo_throughput(link: int, phi_tx: float, phi_rx: float, power: float, topology: Topology,
                    timing: AlignmentParams, noise: float, side_lobe: float,
                    continuous: bool = False) -> float:
    """Throughput of ``link`` transmitting alone."""
    sched = Schedule.build([(link, phi_tx, phi_rx, power)])
    return link_throughput(link, sched, topology, timing, noise, side_lobe, continuous)


@dataclass(frozen=True)
class Radio:
    """Shared radio settings used by the schedulers.

    ``continuous`` selects the relaxed alignment-time model for throughput
    evaluation; the default counts whole pilots.
    """

    timing: AlignmentParams = field(default_factory=AlignmentParams)
    p_max: float = 2.5e-3
    noise: float = 3.4e-11
    side_lobe: float = 0.1
    continuous: bool = False

    def __post_init__(self):
        if self.p_max <= 0 or self.noise <= 0:
            raise ValueError("p_max and noise must be positive")
        if not (0.0 <= self.side_lobe < 1.0):
            raise ValueError("side_lobe must lie in [0, 1)")

    def throughput(self, schedule: Schedule, topology: Topology) -> float:
        return network_throughput(schedule, topology, self.timing, self.noise, self.side_lobe,
                                  self.continuous)

    def link_throughputs(self, schedule: Schedule, topology: Topology) -> np.ndarray:
        return throughput_vector(schedule, topology, self.timing, self.noise, self.side_lobe,
                                 self.continuous)
