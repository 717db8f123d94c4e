"""Simulation configuration and its flat ``key = value`` file format.

Units in the file: angles in degrees, powers in dBm, distances in meters,
times in seconds, frequencies in hertz. Unknown keys are rejected.

Example::

    # Fig. 4 style comparison
    n_links = 2-10
    n_topologies = 100
    p_max_dbm = 3.9794
    sector_tx_deg = 90
    pilot_ratio = 0.01
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .antenna import AlignmentParams
from .geometry import PathLossModel
from .metrics import Radio

BOLTZMANN_DBM_HZ = -174.0


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watt_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w * 1000.0)


def thermal_noise_dbm(bandwidth_hz: float = 2.16e9, noise_figure_db: float = 6.0) -> float:
    return BOLTZMANN_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


@dataclass(frozen=True)
class SimConfig:
    """Everything an experiment needs, in SI units and radians."""

    n_links: tuple[int, ...] = tuple(range(2, 11))
    area_side: float = 10.0
    min_separation: float = 0.1
    carrier: float = 60e9
    p_max: float = 2.5e-3
    noise: float = field(default_factory=lambda: dbm_to_watt(thermal_noise_dbm()))
    side_lobe: float = 0.1
    sector_tx: float = math.pi / 2
    sector_rx: float = math.pi / 2
    slot_time: float = 1e-3
    pilot_ratio: float = 0.01
    sweep_ratios: tuple[float, ...] = (0.005, 0.01, 0.02)
    n_topologies: int = 100
    seed: int = 1
    path_loss_exponent: float = 2.0
    path_loss_intercept_db: float | None = None
    shadowing_db: float = 0.0
    continuous: bool = False
    oracle_resolution: int = 16
    oracle_max_links: int = 12
    link_distance: float = 5.0
    sweep_points: int = 200
    contour_points: int = 61
    jobs: int = 1
    output_dir: str = "."

    def __post_init__(self):
        positive = ("area_side", "carrier", "p_max", "noise", "sector_tx", "sector_rx", "slot_time",
                    "path_loss_exponent", "link_distance")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.n_links or min(self.n_links) < 1:
            raise ValueError("n_links must list positive link counts")
        for r in (self.pilot_ratio, *self.sweep_ratios):
            if not (0.0 < r < 1.0):
                raise ValueError(f"pilot ratio {r} must lie in (0, 1)")
        if not (0.0 <= self.side_lobe < 1.0):
            raise ValueError("side_lobe must lie in [0, 1)")
        if self.sector_tx > 2 * math.pi or self.sector_rx > 2 * math.pi:
            raise ValueError("sectors cannot exceed 360 degrees")
        if self.n_topologies < 1 or self.jobs < 1:
            raise ValueError("n_topologies and jobs must be >= 1")
        if self.oracle_resolution < 2 or self.sweep_points < 3 or self.contour_points < 3:
            raise ValueError("grid resolutions are too small")
        if self.min_separation < 0 or self.shadowing_db < 0:
            raise ValueError("min_separation and shadowing_db must be nonnegative")

    @property
    def path_loss(self) -> PathLossModel:
        return PathLossModel(self.carrier, self.path_loss_exponent, self.path_loss_intercept_db,
                             self.shadowing_db)

    def timing(self, pilot_ratio: float | None = None) -> AlignmentParams:
        ratio = self.pilot_ratio if pilot_ratio is None else pilot_ratio
        return AlignmentParams(self.sector_tx, self.sector_rx, ratio * self.slot_time, self.slot_time)

    def radio(self, pilot_ratio: float | None = None) -> Radio:
        return Radio(self.timing(pilot_ratio), self.p_max, self.noise, self.side_lobe, self.continuous)

    def with_overrides(self, **kwargs) -> "SimConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _int_list(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(",") if p.strip())


def _deg(text: str) -> float:
    return math.radians(float(text))


def _alignment(text: str) -> bool:
    t = text.strip().lower()
    if t not in ("discrete", "continuous"):
        raise ValueError("alignment must be 'discrete' or 'continuous'")
    return t == "continuous"


# file key -> (SimConfig field, parser)
KEYS = {
    "n_links": ("n_links", _int_list),
    "area_side_m": ("area_side", float),
    "min_separation_m": ("min_separation", float),
    "carrier_hz": ("carrier", float),
    "p_max_dbm": ("p_max", lambda s: dbm_to_watt(float(s))),
    "noise_dbm": ("noise", lambda s: dbm_to_watt(float(s))),
    "side_lobe": ("side_lobe", float),
    "sector_tx_deg": ("sector_tx", _deg),
    "sector_rx_deg": ("sector_rx", _deg),
    "slot_time_s": ("slot_time", float),
    "pilot_ratio": ("pilot_ratio", float),
    "sweep_ratios": ("sweep_ratios", _float_list),
    "n_topologies": ("n_topologies", int),
    "seed": ("seed", int),
    "path_loss_exponent": ("path_loss_exponent", float),
    "path_loss_intercept_db": ("path_loss_intercept_db", float),
    "shadowing_db": ("shadowing_db", float),
    "alignment": ("continuous", _alignment),
    "oracle_resolution": ("oracle_resolution", int),
    "oracle_max_links": ("oracle_max_links", int),
    "link_distance_m": ("link_distance", float),
    "sweep_points": ("sweep_points", int),
    "contour_points": ("contour_points", int),
    "jobs": ("jobs", int),
    "output_dir": ("output_dir", str),
}
# derived noise inputs, used only when noise_dbm is absent
NOISE_KEYS = {"bandwidth_hz", "noise_figure_db"}


def parse_config(text: str, base: SimConfig | None = None) -> SimConfig:
    values: dict = {}
    noise_inputs: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in NOISE_KEYS:
            noise_inputs[key] = float(value)
            continue
        if key not in KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        name, parse = KEYS[key]
        try:
            values[name] = parse(value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    if noise_inputs:
        if "noise" in values:
            raise ValueError("give either noise_dbm or bandwidth_hz/noise_figure_db, not both")
        values["noise"] = dbm_to_watt(thermal_noise_dbm(noise_inputs.get("bandwidth_hz", 2.16e9),
                                                        noise_inputs.get("noise_figure_db", 6.0)))
    return replace(base or SimConfig(), **values)


def load_config(path) -> SimConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def dumps_config(cfg: SimConfig) -> str:
    """Round-trippable text form of ``cfg``."""
    inverse = {
        "p_max": lambda v: repr(watt_to_dbm(v)),
        "noise": lambda v: repr(watt_to_dbm(v)),
        "sector_tx": lambda v: repr(math.degrees(v)),
        "sector_rx": lambda v: repr(math.degrees(v)),
        "n_links": lambda v: ",".join(map(str, v)),
        "sweep_ratios": lambda v: ",".join(map(repr, v)),
        "continuous": lambda v: "continuous" if v else "discrete",
    }
    lines = []
    for key, (name, _) in KEYS.items():
        v = getattr(cfg, name)
        if v is None:
            continue
        lines.append(f"{key} = {inverse.get(name, repr if isinstance(v, float) else str)(v)}")
    return "\n".join(lines) + "\n"


__all__ = ["SimConfig", "parse_config", "load_config", "dumps_config", "dbm_to_watt", "watt_to_dbm",
           "thermal_noise_dbm", "KEYS"]
