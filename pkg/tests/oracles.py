"""Independent reference implementations used only by the tests."""

import itertools
import math

import mpmath
import numpy as np

from mmwsched.singlelink import SingleLinkProblem

mpmath.mp.dps = 40


def random_problem(rng) -> SingleLinkProblem:
    """A single-link problem drawn from the 60 GHz region of interest."""
    return SingleLinkProblem(
        c2=float(10 ** rng.uniform(-2.0, 3.0)),
        side_lobe=float(rng.uniform(0.0, 0.3)),
        sector_tx=float(rng.uniform(math.pi / 4, math.pi)),
        sector_rx=float(rng.uniform(math.pi / 4, math.pi)),
        pilot_ratio=float(10 ** rng.uniform(-2.7, -1.3)),
    )


def mp_throughput(phi, prob):
    phi = mpmath.mpf(phi)
    c1 = mpmath.mpf(prob.sector_tx) * mpmath.mpf(prob.sector_rx) * mpmath.mpf(prob.pilot_ratio)
    z = mpmath.mpf(prob.side_lobe)
    c2 = mpmath.mpf(prob.c2)
    k = (2 * mpmath.pi * (1 - z)) ** 2
    return (1 - c1 / phi) * mpmath.log(1 + c2 * z ** 2 + c2 * k / phi, 2)


def central_difference(phi, prob, rel_step=1e-6):
    h = mpmath.mpf(phi) * rel_step
    return float((mp_throughput(phi + h, prob) - mp_throughput(phi - h, prob)) / (2 * h))


def grid_argmax(prob, points=1_000_000):
    lo, hi = prob.c1, prob.sector_tx * prob.sector_rx
    grid = np.linspace(lo, hi, points)
    c2, z = prob.c2, prob.side_lobe
    k = (2 * math.pi * (1 - z)) ** 2
    values = (1 - lo / grid) * np.log2(1 + c2 * z * z + c2 * k / grid)
    i = int(np.argmax(values))
    return float(grid[i]), float(values[i]), float(grid[1] - grid[0])


def brute_force_mis(n, adjacency):
    """Maximal independent sets by checking all 2^n subsets."""
    independent = []
    for mask in range(1, 1 << n):
        verts = [v for v in range(n) if mask >> v & 1]
        if all(not adjacency[a][b] for a, b in itertools.combinations(verts, 2)):
            independent.append(mask)
    indep = set(independent)
    maximal = []
    for mask in independent:
        if all((mask | (1 << v)) not in indep for v in range(n) if not mask >> v & 1):
            maximal.append(tuple(v for v in range(n) if mask >> v & 1))
    if n and not maximal:
        return []
    return sorted(maximal)
