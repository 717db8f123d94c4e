"""Ideal sectored antenna pattern and pilot-based beam alignment overhead.

The pattern has a constant main-lobe gain inside the beamwidth and a constant
side-lobe gain ``z`` elsewhere. The main-lobe level is fixed by requiring the
gain to integrate to 2*pi over the circle, so total radiated power does not
depend on the beamwidth or on ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Map angles (scalar or array) into (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), TWO_PI)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def _check_pattern(beamwidth: float, side_lobe: float) -> None:
    if not (0.0 < beamwidth <= TWO_PI):
        raise ValueError(f"beamwidth must lie in (0, 2*pi], got {beamwidth!r}")
    if not (0.0 <= side_lobe < 1.0):
        raise ValueError(f"side-lobe gain must lie in [0, 1), got {side_lobe!r}")


def main_lobe_gain(beamwidth, side_lobe: float):
    """Main-lobe gain ``(2*pi - (2*pi - phi) * z) / phi``; vectorised over beamwidth."""
    phi = np.asarray(beamwidth, dtype=float)
    if np.any(phi <= 0.0) or np.any(phi > TWO_PI):
        raise ValueError("beamwidth must lie in (0, 2*pi]")
    if not (0.0 <= side_lobe < 1.0):
        raise ValueError(f"side-lobe gain must lie in [0, 1), got {side_lobe!r}")
    g = (TWO_PI - (TWO_PI - phi) * side_lobe) / phi
    return float(g) if g.ndim == 0 else g


def directivity_gain(theta, beamwidth, side_lobe: float):
    """Gain of a sectored antenna at angle ``theta`` off boresight.

    The same pattern serves transmitters and receivers. ``theta`` and
    ``beamwidth`` broadcast against each other; scalars in give a float out.
    """
    theta = wrap_angle(theta)
    main = main_lobe_gain(beamwidth, side_lobe)
    # tiny slack so that a device aimed exactly at its peer is in the main lobe
    inside = np.abs(theta) <= np.asarray(beamwidth, dtype=float) / 2.0 + 1e-12
    g = np.where(inside, main, side_lobe)
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class SectoredAntenna:
    beamwidth: float
    side_lobe: float = 0.0
    boresight: float = 0.0

    def __post_init__(self):
        _check_pattern(self.beamwidth, self.side_lobe)
        if not (0.0 <= self.boresight < TWO_PI):
            object.__setattr__(self, "boresight", float(np.mod(self.boresight, TWO_PI)))

    @property
    def peak_gain(self) -> float:
        return main_lobe_gain(self.beamwidth, self.side_lobe)

    def gain_towards(self, direction: float) -> float:
        """Gain toward an absolute direction (radians)."""
        return directivity_gain(direction - self.boresight, self.beamwidth, self.side_lobe)


@dataclass(frozen=True)
class AlignmentParams:
    """Sector widths and pilot timing for beam-level alignment.

    Attributes:
        sector_tx: transmitter sector width (rad), searched at beam level.
        sector_rx: receiver sector width (rad).
        pilot_time: duration of one pilot transmission (s).
        slot_time: time slot duration (s).
    """

    sector_tx: float = math.pi / 2
    sector_rx: float = math.pi / 2
    pilot_time: float = 1e-5
    slot_time: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.pilot_time < self.slot_time):
            raise ValueError("need 0 < pilot_time < slot_time")
        for name in ("sector_tx", "sector_rx"):
            width = getattr(self, name)
            if not (0.0 < width <= TWO_PI):
                raise ValueError(f"{name} must lie in (0, 2*pi], got {width!r}")

    @property
    def pilot_ratio(self) -> float:
        return self.pilot_time / self.slot_time

    @classmethod
    def from_ratio(cls, ratio: float, sector_tx: float = math.pi / 2,
                   sector_rx: float | None = None, slot_time: float = 1e-3) -> "AlignmentParams":
        return cls(sector_tx, sector_tx if sector_rx is None else sector_rx,
                   ratio * slot_time, slot_time)


def pilot_count(sector: float, beamwidth: float) -> int:
    """Number of beam directions needed to cover ``sector`` with ``beamwidth``."""
    # guard against 1.9999999999 -> 2 but 2.0000000001 -> 3
    q = sector / beamwidth
    r = round(q)
    if abs(q - r) <= 1e-9 * max(1.0, q):
        return max(int(r), 1)
    return max(math.ceil(q), 1)


def alignment_time(params: AlignmentParams, phi_tx: float, phi_rx: float,
                   continuous: bool = False) -> float:
    """Time spent on the exhaustive transmit/receive beam search.

    By default the pilot counts are whole numbers (ceiling). With
    ``continuous=True`` the relaxation ``(psi_t/phi_t)(psi_r/phi_r) T_p`` is
    returned instead.
    """
    if not (0.0 < phi_tx <= params.sector_tx * (1 + 1e-12)):
        raise ValueError(f"transmit beamwidth {phi_tx!r} outside (0, {params.sector_tx}]")
    if not (0.0 < phi_rx <= params.sector_rx * (1 + 1e-12)):
        raise ValueError(f"receive beamwidth {phi_rx!r} outside (0, {params.sector_rx}]")
    if continuous:
        return (params.sector_tx / phi_tx) * (params.sector_rx / phi_rx) * params.pilot_time
    return pilot_count(params.sector_tx, phi_tx) * pilot_count(params.sector_rx, phi_rx) * params.pilot_time


def feasible_beamwidths(params: AlignmentParams, phi_tx: float, phi_rx: float) -> bool:
    """True when the beams fit their sectors and alignment fits in the slot."""
    if phi_tx <= 0.0 or phi_rx <= 0.0:
        return False
    if phi_tx > params.sector_tx * (1 + 1e-12) or phi_rx > params.sector_rx * (1 + 1e-12):
        return False
    bound = params.pilot_ratio * params.sector_tx * params.sector_rx
    return phi_tx * phi_rx >= bound * (1 - 1e-12)
