"""Beamwidth optimisation for a link transmitting alone.

Transmit and receive beamwidths enter the (slightly simplified) throughput
only through their product ``phi = phi_t * phi_r``::

    R(phi) = (1 - c1/phi) * log2(1 + c2 z^2 + c2 (2 pi (1 - z))^2 / phi)

with ``c1 = psi_t psi_r T_p / T`` (the smallest feasible product) and
``c2 = g_c p_max / n``. On the feasible interval ``[c1, psi_t psi_r]`` the
stationarity condition splits into a strictly decreasing and a strictly
increasing side, so there is at most one stationary point and bisection
brackets it reliably.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .antenna import AlignmentParams, main_lobe_gain, pilot_count

LN2 = math.log(2.0)
BRACKET_EPS = 1e-9
RTOL = 1e-10


@dataclass(frozen=True)
class SingleLinkProblem:
    """One link at full power with no interference.

    Attributes:
        c2: interference-free SNR with isotropic antennas, ``g_c p_max / n``.
        side_lobe: side-lobe gain ``z`` of both antennas.
        sector_tx, sector_rx: sector widths (rad).
        pilot_ratio: ``T_p / T``.
    """

    c2: float
    side_lobe: float = 0.0
    sector_tx: float = math.pi / 2
    sector_rx: float = math.pi / 2
    pilot_ratio: float = 0.01

    def __post_init__(self):
        if not (self.c2 > 0 and math.isfinite(self.c2)):
            raise ValueError(f"c2 must be positive and finite, got {self.c2!r}")
        if not (0.0 <= self.side_lobe < 1.0):
            raise ValueError("side_lobe must lie in [0, 1)")
        if not (0.0 < self.pilot_ratio < 1.0):
            raise ValueError("pilot_ratio must lie in (0, 1)")
        if self.sector_tx <= 0 or self.sector_rx <= 0:
            raise ValueError("sector widths must be positive")

    @classmethod
    def from_link(cls, params: AlignmentParams, channel_gain: float, p_max: float, noise: float,
                  side_lobe: float) -> "SingleLinkProblem":
        return cls(channel_gain * p_max / noise, side_lobe, params.sector_tx, params.sector_rx,
                   params.pilot_ratio)

    @property
    def c1(self) -> float:
        return self.sector_tx * self.sector_rx * self.pilot_ratio

    @property
    def interval(self) -> tuple[float, float]:
        return self.c1, self.sector_tx * self.sector_rx

    @property
    def k(self) -> float:
        # squared main-lobe numerator (2 pi - 2 pi z)^2
        return (2.0 * math.pi * (1.0 - self.side_lobe)) ** 2

    def check(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        lo, hi = self.interval
        if np.any(phi < lo * (1 - 1e-12)) or np.any(phi > hi * (1 + 1e-12)):
            raise ValueError(f"beamwidth product outside feasible interval [{lo:.6g}, {hi:.6g}]")
        return phi


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _snr_arg(phi, prob: SingleLinkProblem):
    return 1.0 + prob.c2 * prob.side_lobe ** 2 + prob.c2 * prob.k / phi


def simplified_throughput(phi, prob: SingleLinkProblem):
    """Throughput as a function of the beamwidth product alone."""
    phi = prob.check(phi)
    return _scalar((1.0 - prob.c1 / phi) * np.log2(_snr_arg(phi, prob)))


def throughput_derivative(phi, prob: SingleLinkProblem):
    """Closed-form derivative of :func:`simplified_throughput` in ``phi``."""
    phi = prob.check(phi)
    a = _snr_arg(phi, prob)
    first = prob.c1 / phi ** 2 * np.log2(a)
    second = (1.0 - prob.c1 / phi) * prob.c2 * prob.k / (phi ** 2 * LN2 * a)
    return _scalar(first - second)


def root_sides(phi, prob: SingleLinkProblem):
    """Both sides of the stationarity condition, scaled by ``phi**2``.

    The derivative equals ``(lhs - rhs) / phi**2``; ``lhs`` is strictly
    decreasing and ``rhs`` strictly increasing in ``phi``.
    """
    phi = prob.check(phi)
    lhs = prob.c1 * np.log2(_snr_arg(phi, prob))
    rhs = (prob.c2 * prob.k / LN2) * (phi - prob.c1) / ((1.0 + prob.c2 * prob.side_lobe ** 2) * phi
                                                      + prob.c2 * prob.k)
    return _scalar(lhs), _scalar(rhs)


def _root_gap(phi: float, prob: SingleLinkProblem) -> float:
    lhs, rhs = root_sides(phi, prob)
    return lhs - rhs


@dataclass(frozen=True)
class ProductSolution:
    phi: float
    throughput: float
    boundary: bool
    iterations: int = 0


def optimal_beamwidth_product(prob: SingleLinkProblem, rtol: float = RTOL) -> ProductSolution:
    """Maximise :func:`simplified_throughput` over the feasible interval.

    Bisects the sign change of the stationarity gap. When the gap keeps one
    sign over the whole bracket the better endpoint is returned with
    ``boundary=True``.
    """
    c1, hi = prob.interval
    lo = c1 * (1.0 + BRACKET_EPS)
    if lo >= hi:
        return ProductSolution(hi, float(simplified_throughput(hi, prob)), True)
    g_lo, g_hi = _root_gap(lo, prob), _root_gap(hi, prob)
    if g_lo <= 0.0 or g_hi >= 0.0:
        ends = [(float(simplified_throughput(x, prob)), x) for x in (c1, hi)]
        best_r, best_phi = max(ends, key=lambda t: t[0])
        return ProductSolution(best_phi, best_r, True)
    it = 0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _root_gap(mid, prob) > 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    phi = 0.5 * (lo + hi)
    return ProductSolution(phi, float(simplified_throughput(phi, prob)), False, it)


def split_product(phi: float, sector_tx: float, sector_rx: float) -> tuple[float, float]:
    """Equal transmit/receive beamwidths with product ``phi``.

    If the square root does not fit one sector, that beam is pinned to its
    sector width and the other beam absorbs the remaining factor.
    """
    if phi <= 0:
        raise ValueError("beamwidth product must be positive")
    if phi > sector_tx * sector_rx * (1 + 1e-12):
        raise ValueError(f"product {phi:.6g} exceeds sector product {sector_tx * sector_rx:.6g}")
    root = math.sqrt(phi)
    if root > sector_tx:
        return sector_tx, min(phi / sector_tx, sector_rx)
    if root > sector_rx:
        return min(phi / sector_rx, sector_tx), sector_rx
    return root, root


def exact_throughput(phi_tx: float, phi_rx: float, prob: SingleLinkProblem, continuous: bool = False) -> float:
    """Solo throughput without the product approximation (full sectored-gain SNR)."""
    snr = prob.c2 * main_lobe_gain(phi_tx, prob.side_lobe) * main_lobe_gain(phi_rx, prob.side_lobe)
    if continuous:
        pilots = (prob.sector_tx / phi_tx) * (prob.sector_rx / phi_rx)
    else:
        pilots = pilot_count(prob.sector_tx, phi_tx) * pilot_count(prob.sector_rx, phi_rx)
    return max(0.0, 1.0 - pilots * prob.pilot_ratio) * math.log2(1.0 + snr)


@dataclass(frozen=True)
class LinkBeams:
    """Chosen solo operating point of one link."""

    phi_tx: float
    phi_rx: float
    product: float
    throughput: float
    boundary: bool


def lattice_neighbours(phi: float, prob: SingleLinkProblem) -> list[tuple[float, float]]:
    """Beam pairs ``(psi_t/m_t, psi_r/m_r)`` with pilot counts bracketing the symmetric split."""
    a, b = split_product(phi, prob.sector_tx, prob.sector_rx)
    max_pilots = 1.0 / prob.pilot_ratio
    out = []
    for mt in {max(1, math.floor(prob.sector_tx / a)), max(1, math.ceil(prob.sector_tx / a - 1e-9))}:
        for mr in {max(1, math.floor(prob.sector_rx / b)), max(1, math.ceil(prob.sector_rx / b - 1e-9))}:
            if mt * mr < max_pilots * (1 - 1e-12):
                out.append((prob.sector_tx / mt, prob.sector_rx / mr))
    return sorted(out) or [(prob.sector_tx, prob.sector_rx)]


def solve_link(prob: SingleLinkProblem, continuous: bool = False) -> LinkBeams:
    """Solo operating point: continuous optimum, optionally snapped to whole pilot counts.

    With ``continuous=False`` the continuous optimum is mapped to the best
    neighbouring lattice point under whole-pilot alignment time.
    """
    sol = optimal_beamwidth_product(prob)
    if continuous:
        a, b = split_product(sol.phi, prob.sector_tx, prob.sector_rx)
        return LinkBeams(a, b, a * b, exact_throughput(a, b, prob, True), sol.boundary)
    best = max(lattice_neighbours(sol.phi, prob),
               key=lambda ab: (exact_throughput(ab[0], ab[1], prob), -ab[0] * ab[1]))
    a, b = best
    return LinkBeams(a, b, a * b, exact_throughput(a, b, prob), sol.boundary)
