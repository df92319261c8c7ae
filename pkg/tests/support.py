"""Shared helpers for the test suite: independent oracles and generators."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from iscsim.model import (
    ConstantIncentive,
    GoodsDistribution,
    PeerClass,
    SaturatingIncentive,
    Scenario,
)


def bisect_single_club(
    size: float, kappa: float, overlap: float = 0.0, iterations: int = 200
) -> float:
    """Largest root of n = N (1 - e^{-kappa (1 - q) n}), found by hand.

    Independent of the package's solver: plain scalar bisection on the
    closed-form map.  Returns 0.0 when the map never crosses the diagonal
    from above (non-viable club).
    """
    rate = kappa * (1.0 - overlap)

    def excess(n: float) -> float:
        return size * (1.0 - math.exp(-rate * n)) - n

    # The excess is positive somewhere iff the largest root is positive;
    # its maximum is interior, so probing a coarse grid finds the sign.
    grid = [size * k / 64.0 for k in range(1, 64)]
    above = [n for n in grid if excess(n) > 0.0]
    if not above:
        return 0.0
    lo, hi = above[-1], size
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_distribution(rng: np.random.Generator, goods: int) -> GoodsDistribution:
    raw = rng.dirichlet(np.full(goods, 0.8))
    return GoodsDistribution(raw / raw.sum())


def random_scenario(
    rng: np.random.Generator,
    *,
    equal_kbar: bool = False,
    with_seed_content: bool = True,
) -> Scenario:
    """A small random scenario with positive contributions and mixed incentives."""
    goods = int(rng.integers(1, 5))
    classes = []
    shared_kbar = float(rng.uniform(0.2, 3.0))
    for _ in range(int(rng.integers(1, 4))):
        if rng.random() < 0.5:
            incentive = ConstantIncentive(float(rng.uniform(0.005, 0.9)))
        else:
            rho0 = float(rng.uniform(0.0, 0.4))
            rho_max = float(rng.uniform(rho0 + 0.05, 1.0))
            incentive = SaturatingIncentive(rho0, rho_max, float(rng.uniform(0.1, 3.0)))
        classes.append(
            PeerClass(
                size=int(rng.integers(5, 120)),
                demand=random_distribution(rng, goods),
                supply=random_distribution(rng, goods),
                kbar=shared_kbar if equal_kbar else float(rng.uniform(0.2, 3.0)),
                incentive=incentive,
                contribution=float(rng.uniform(0.1, 4.0)),
            )
        )
    phi0 = float(rng.uniform(0.5, 20.0)) if with_seed_content else 0.0
    return Scenario(
        classes=tuple(classes),
        phi0=phi0,
        seed_distribution=random_distribution(rng, goods),
    )


def random_state(rng: np.random.Generator, scenario: Scenario) -> np.ndarray:
    """Interior membership counts for every class of the scenario."""
    sizes = np.array([c.size for c in scenario.classes], dtype=float)
    return sizes * rng.uniform(0.1, 0.9, size=sizes.size)


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def column(rows: list[list[str]], header: list[str], name: str) -> list[float]:
    index = header.index(name)
    return [float(row[index]) for row in rows]
