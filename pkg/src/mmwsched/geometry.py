"""Planar deployments: link placement, path gains and relative angles."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .antenna import wrap_angle

SPEED_OF_LIGHT = 299_792_458.0
MAX_REDRAWS = 1000


def free_space_intercept_db(carrier_hz: float) -> float:
    """Free-space loss at 1 m, ``20 log10(4 pi / lambda)``."""
    wavelength = SPEED_OF_LIGHT / carrier_hz
    return 20.0 * math.log10(4.0 * math.pi / wavelength)


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss with optional log-normal shadowing.

    ``intercept_db`` defaults to the free-space loss at 1 m for ``carrier_hz``
    (about 68 dB at 60 GHz). Shadowing is off unless ``shadowing_db > 0``.
    """

    carrier_hz: float = 60e9
    exponent: float = 2.0
    intercept_db: float | None = None
    shadowing_db: float = 0.0

    def __post_init__(self):
        if self.carrier_hz <= 0 or self.exponent <= 0 or self.shadowing_db < 0:
            raise ValueError("carrier and exponent must be positive, shadowing nonnegative")

    @property
    def reference_loss_db(self) -> float:
        if self.intercept_db is not None:
            return self.intercept_db
        return free_space_intercept_db(self.carrier_hz)

    def loss_db(self, distance):
        d = np.asarray(distance, dtype=float)
        if np.any(d <= 0):
            raise ValueError("distance must be positive")
        loss = self.reference_loss_db + 10.0 * self.exponent * np.log10(d)
        return float(loss) if loss.ndim == 0 else loss


def path_gain(distance, model: PathLossModel | None = None, rng: np.random.Generator | None = None):
    """Linear power gain over ``distance`` meters.

    With shadowing enabled a zero-mean normal term (dB) is added per entry;
    ``rng`` must then be supplied.
    """
    model = model or PathLossModel()
    loss = np.asarray(model.loss_db(distance))
    if model.shadowing_db > 0:
        if rng is None:
            raise ValueError("shadowing requires an rng")
        loss = loss + rng.normal(0.0, model.shadowing_db, size=loss.shape)
    gain = 10.0 ** (-loss / 10.0)
    return float(gain) if gain.ndim == 0 else gain


def path_gain_db(distance, model: PathLossModel | None = None) -> float:
    return -(model or PathLossModel()).loss_db(distance)


@dataclass(frozen=True)
class Link:
    id: int
    tx: tuple[float, float]
    rx: tuple[float, float]
    sector_tx: float = math.pi / 2
    sector_rx: float = math.pi / 2

    @property
    def length(self) -> float:
        return math.dist(self.tx, self.rx)


def _bearing(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    d = dst - src
    return np.arctan2(d[..., 1], d[..., 0])


def relative_angles(tx: np.ndarray, rx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Off-boresight angles for every transmitter/receiver pair.

    Every device points at its own peer. Returns ``(theta_t, theta_r)`` with
    ``theta_t[i, j]`` the angle at transmitter i toward receiver j and
    ``theta_r[i, j]`` the angle at receiver j toward transmitter i, both in
    (-pi, pi].
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    bore_t = _bearing(tx, rx)
    bore_r = _bearing(rx, tx)
    to_rx = _bearing(tx[:, None, :], rx[None, :, :])   # [i, j]: tx i -> rx j
    to_tx = _bearing(rx[None, :, :], tx[:, None, :])   # [i, j]: rx j -> tx i
    theta_t = wrap_angle(to_rx - bore_t[:, None])
    theta_r = wrap_angle(to_tx - bore_r[None, :])
    np.fill_diagonal(theta_t, 0.0)
    np.fill_diagonal(theta_r, 0.0)
    return np.atleast_2d(theta_t), np.atleast_2d(theta_r)


@dataclass(frozen=True, eq=False)
class Topology:
    """Links plus all pairwise channel gains and angles.

    Matrices are indexed ``[transmitter link, receiver link]``.
    """

    links: tuple[Link, ...]
    channel_gain: np.ndarray
    theta_t: np.ndarray
    theta_r: np.ndarray
    path_loss: PathLossModel = field(default_factory=PathLossModel)

    def __post_init__(self):
        for m in (self.channel_gain, self.theta_t, self.theta_r):
            m.setflags(write=False)

    def __len__(self) -> int:
        return len(self.links)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def tx_positions(self) -> np.ndarray:
        return np.array([l.tx for l in self.links], dtype=float).reshape(-1, 2)

    @property
    def rx_positions(self) -> np.ndarray:
        return np.array([l.rx for l in self.links], dtype=float).reshape(-1, 2)

    @property
    def sector_tx(self) -> np.ndarray:
        return np.array([l.sector_tx for l in self.links])

    @property
    def sector_rx(self) -> np.ndarray:
        return np.array([l.sector_rx for l in self.links])

    @classmethod
    def from_positions(cls, tx, rx, sector_tx: float = math.pi / 2, sector_rx: float = math.pi / 2,
                       path_loss: PathLossModel | None = None,
                       rng: np.random.Generator | None = None) -> "Topology":
        path_loss = path_loss or PathLossModel()
        tx = np.asarray(tx, dtype=float).reshape(-1, 2)
        rx = np.asarray(rx, dtype=float).reshape(-1, 2)
        if tx.shape != rx.shape or len(tx) == 0:
            raise ValueError("need matching, nonempty transmitter and receiver arrays")
        links = tuple(Link(i, (float(a[0]), float(a[1])), (float(b[0]), float(b[1])), sector_tx, sector_rx)
                      for i, (a, b) in enumerate(zip(tx, rx)))
        dist = np.linalg.norm(tx[:, None, :] - rx[None, :, :], axis=-1)
        gain = np.atleast_2d(path_gain(dist, path_loss, rng))
        theta_t, theta_r = relative_angles(tx, rx)
        return cls(links, gain, theta_t, theta_r, path_loss)

    def subset(self, ids) -> "Topology":
        ids = list(ids)
        idx = np.ix_(ids, ids)
        links = tuple(Link(k, l.tx, l.rx, l.sector_tx, l.sector_rx)
                      for k, l in enumerate(self.links[i] for i in ids))
        return Topology(links, self.channel_gain[idx].copy(), self.theta_t[idx].copy(),
                        self.theta_r[idx].copy(), self.path_loss)

    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.n_links}\n")
        for l in self.links:
            buf.write(f"{l.id} {l.tx[0]:.6f} {l.tx[1]:.6f} {l.rx[0]:.6f} {l.rx[1]:.6f}\n")
        return buf.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="ascii")


def loads_topology(text: str, sector_tx: float = math.pi / 2, sector_rx: float = math.pi / 2,
                   path_loss: PathLossModel | None = None) -> Topology:
    """Parse the ``N`` header + ``id tx_x tx_y rx_x rx_y`` line format.

    Channel gains are recomputed from positions; shadowing draws are not
    stored in the file, so a reloaded topology is shadowing-free.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty topology file")
    try:
        n = int(lines[0][0])
    except ValueError as exc:
        raise ValueError(f"bad topology header {lines[0]!r}") from exc
    rows = lines[1:]
    if len(lines[0]) != 1 or len(rows) != n:
        raise ValueError(f"header says {n} links, found {len(rows)}")
    parsed = {}
    for row in rows:
        if len(row) != 5:
            raise ValueError(f"expected 5 fields per link line, got {row!r}")
        parsed[int(row[0])] = [float(v) for v in row[1:]]
    if sorted(parsed) != list(range(n)):
        raise ValueError("link ids must be 0..N-1")
    coords = np.array([parsed[i] for i in range(n)])
    if path_loss is not None and path_loss.shadowing_db > 0:
        path_loss = PathLossModel(path_loss.carrier_hz, path_loss.exponent, path_loss.intercept_db, 0.0)
    return Topology.from_positions(coords[:, :2], coords[:, 2:], sector_tx, sector_rx, path_loss)


def load_topology(path, **kwargs) -> Topology:
    return loads_topology(Path(path).read_text(encoding="ascii"), **kwargs)


def generate_topology(n_links: int, area_side: float = 10.0, min_separation: float = 0.1,
                      seed: int | np.random.SeedSequence | np.random.Generator = 0,
                      sector_tx: float = math.pi / 2, sector_rx: float = math.pi / 2,
                      path_loss: PathLossModel | None = None) -> Topology:
    """Drop ``n_links`` transmitter/receiver pairs uniformly in a square.

    Devices are placed link by link; a pair is redrawn while any of its
    endpoints falls closer than ``min_separation`` to an opposite-role
    device already placed (or to its own peer).
    """
    if n_links < 1:
        raise ValueError("n_links must be >= 1")
    if area_side <= 0 or min_separation < 0:
        raise ValueError("area_side must be positive and min_separation nonnegative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    tx = np.empty((n_links, 2))
    rx = np.empty((n_links, 2))
    for i in range(n_links):
        for _ in range(MAX_REDRAWS):
            a, b = rng.uniform(0.0, area_side, size=(2, 2))
            if math.dist(a, b) < min_separation:
                continue
            if i and (np.min(np.linalg.norm(rx[:i] - a, axis=1)) < min_separation
                      or np.min(np.linalg.norm(tx[:i] - b, axis=1)) < min_separation):
                continue
            tx[i], rx[i] = a, b
            break
        else:
            raise RuntimeError(f"could not place link {i} after {MAX_REDRAWS} draws; "
                               "area too small for min_separation")
    return Topology.from_positions(tx, rx, sector_tx, sector_rx, path_loss, rng)
