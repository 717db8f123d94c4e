"""Joint beamwidth selection and transmission scheduling for directional mmWave networks."""

from .antenna import (AlignmentParams, SectoredAntenna, alignment_time, directivity_gain, feasible_beamwidths,
                      main_lobe_gain)
from .config import SimConfig, load_config, parse_config
from .geometry import Link, PathLossModel, Topology, generate_topology, load_topology, path_gain, relative_angles
from .metrics import Radio, Schedule, link_throughput, network_throughput, sinr
from .scheduler import (ConflictGraph, SectorMeasurements, build_conflict_graph, maximal_independent_sets,
                        schedule_oracle, schedule_overestimation, schedule_single_link, schedule_underestimation,
                        sector_measurements)
from .singlelink import (SingleLinkProblem, optimal_beamwidth_product, simplified_throughput, split_product,
                         throughput_derivative)

__version__ = "0.1.0"
