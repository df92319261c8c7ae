"""Deterministic analysis of the club-formation dynamics.

Influx rates, damped fixed-point solving of n = N * P(n), stability of a
fixed point from the eigenvalues of a finite-difference Jacobian, and the
two viability conditions for the empty club (the sufficient population
bound and the necessary seed-content condition).

When a scenario declares endogenous contribution, classes whose members
would not contribute at the empty club are excluded from the dynamics:
their in-club counts must be zero and they are solved or perturbed as if
their population were zero.  Their supply and demand still shape nothing,
since no member of theirs is ever inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    ClubState,
    Scenario,
    StateLike,
    _class_probabilities,
    _counts_for,
)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 1_000_000
_DAMPING = 0.5
_STALL_WINDOW = 1_000  # iterations without residual improvement before bisection


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed; carries the last iterate and residual."""

    def __init__(self, message: str, counts: ClubState, residual: float, iterations: int):
        super().__init__(message)
        self.counts = counts
        self.residual = residual
        self.iterations = iterations


class Influx(NamedTuple):
    """Net membership flow per round: joins minus leaves."""

    per_class: np.ndarray
    total: float


@dataclass(frozen=True)
class EquilibriumSolution:
    """A fixed point of the membership dynamics."""

    counts: ClubState
    residual: float
    stable: bool
    iterations: int

    @property
    def per_class(self) -> np.ndarray:
        return self.counts.counts

    @property
    def total(self) -> float:
        return self.counts.total


@dataclass(frozen=True)
class ViabilityReport:
    """Both empty-club viability conditions evaluated on one scenario.

    sufficient_*: the population bound N(0) * sum_s g(s) h(s) against
    1 / (kbar * rho(0+)), averaged over the potentially contributing
    population.  Holding it guarantees the empty club is unstable.
    necessary_value: mean initial incentive slope times seed content,
    rho'(0) * phi0; without it being positive, an empty club can never
    attract a first contribution.
    empty_club_growth_rate: signed growth rate of a perturbation of the
    empty club, positive exactly when the club self-starts.
    """

    sufficient_lhs: float
    sufficient_rhs: float
    sufficient_holds: bool
    necessary_value: float
    necessary_holds: bool
    empty_club_growth_rate: float


def _dynamic_counts(scenario: Scenario, state: StateLike) -> np.ndarray:
    """Counts validated for the dynamics: excluded classes must sit at zero."""
    counts = _counts_for(scenario, state)
    if np.any(counts > scenario._dynamic_sizes):
        raise ValueError(
            "counts exceed the contributing population "
            "(non-contributing classes must have zero members)"
        )
    return counts


def _raw_influx(scenario: Scenario, counts: np.ndarray) -> np.ndarray:
    return scenario._dynamic_sizes * _class_probabilities(scenario, counts) - counts


def influx_rate(scenario: Scenario, state: StateLike) -> Influx:
    """Net expected membership change per round, per class and total.

    r_c = N_c * P_c - n_c, which equals joins (N_c - n_c) * P_c minus
    leaves n_c * (1 - P_c).
    """
    counts = _dynamic_counts(scenario, state)
    per_class = _raw_influx(scenario, counts)
    return Influx(per_class, float(per_class.sum()))


def solve_equilibrium(
    scenario: Scenario,
    init: StateLike | None = None,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EquilibriumSolution:
    """Solve the membership fixed point n_c = N_c * P_c(n).

    Damped iteration n <- (1 - lambda) n + lambda N P(n) with lambda = 0.5,
    started from full membership unless init is given.  Starting high makes
    the iteration settle on the largest (prosperous) fixed point for the
    monotone maps this model produces.  Scalar problems fall back to
    bisection on the influx residual if the iteration stalls.

    Raises ConvergenceError, carrying the last iterate and residual, if no
    fixed point is reached within max_iter iterations.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")
    sizes = scenario._dynamic_sizes
    if init is None:
        n = sizes.copy()
    else:
        n = _dynamic_counts(scenario, init).copy()

    scalar = n.size == 1
    best = math.inf
    stalled = 0
    iterations = 0
    residual = math.inf
    for iterations in range(1, max_iter + 1):
        target = sizes * _class_probabilities(scenario, n)
        residual = float(np.abs(target - n).max())
        if residual <= tol:
            state = ClubState(n)
            return EquilibriumSolution(
                state, residual, classify_stability(scenario, state), iterations
            )
        if residual < best:
            best = residual
            stalled = 0
        else:
            stalled += 1
            if scalar and stalled >= _STALL_WINDOW:
                break
        n = (1.0 - _DAMPING) * n + _DAMPING * target

    if scalar:
        solution = _bisect_scalar(scenario, tol, iterations)
        if solution is not None:
            return solution
    raise ConvergenceError(
        f"no fixed point within {iterations} iterations (residual {residual:.3e})",
        ClubState(n),
        residual,
        iterations,
    )


def _bisect_scalar(
    scenario: Scenario, tol: float, iterations_used: int
) -> EquilibriumSolution | None:
    """Largest root of r(n) = N P(n) - n for a single-class scenario."""
    size = float(scenario._dynamic_sizes[0])

    def influx(x: float) -> float:
        return float(_raw_influx(scenario, np.array([x]))[0])

    grid = np.linspace(0.0, size, 4097)
    values = np.array([influx(x) for x in grid])
    positive = np.nonzero(values > 0.0)[0]
    if positive.size == 0:
        # The map never rises above the diagonal; the only candidate is 0.
        root = 0.0
    else:
        lo = grid[positive[-1]]
        hi = grid[positive[-1] + 1] if positive[-1] + 1 < grid.size else size
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if influx(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
    residual = abs(influx(root))
    if residual > tol:
        return None
    state = ClubState(np.array([root]))
    return EquilibriumSolution(
        state, residual, classify_stability(scenario, state), iterations_used + 200
    )


def classify_stability(
    scenario: Scenario, state: StateLike, *, step: float | None = None
) -> bool:
    """Whether a fixed point attracts: all influx-Jacobian eigenvalues negative.

    The Jacobian is built from central finite differences of the influx
    rate; the stencil may probe slightly outside [0, N_c], which the raw
    kernels support.  For a single class this reduces to the sign of
    dr/dn.
    """
    counts = _dynamic_counts(scenario, state)
    if step is None:
        step = max(1e-4, 1e-6 * float(scenario._sizes.sum()))
    dim = counts.size
    jacobian = np.empty((dim, dim))
    for d in range(dim):
        bump = np.zeros(dim)
        bump[d] = step
        forward = _raw_influx(scenario, counts + bump)
        backward = _raw_influx(scenario, counts - bump)
        jacobian[:, d] = (forward - backward) / (2.0 * step)
    eigenvalues = np.linalg.eigvals(jacobian)
    return bool(eigenvalues.real.max() < 0.0)


def check_viability(scenario: Scenario) -> ViabilityReport:
    """Evaluate both empty-club viability conditions.

    The population entering the sufficient condition is the potentially
    contributing one: every class when contribution is taken as given,
    only the classes that choose to contribute otherwise.  Content and demand enter
    through their population-weighted averages; kbar * rho(0+) through its
    class-size-weighted average.  The growth rate uses each class's
    efficiency at its configured contribution, matching the slope of the
    influx rate at the empty club.
    """
    sizes = scenario._sizes
    population = float(sizes.sum())
    if population > 0.0:
        slopes = np.array(
            [c.incentive.efficiency_derivative(0.0) for c in scenario.classes]
        )
        necessary_value = float(sizes @ slopes / population) * scenario.phi0
    else:
        necessary_value = 0.0
    necessary_holds = necessary_value > 0.0

    dynamic = scenario._dynamic_sizes
    n0 = float(dynamic.sum())
    if n0 == 0.0:
        return ViabilityReport(
            0.0, math.inf, False, necessary_value, necessary_holds, -1.0
        )

    mean_supply = dynamic @ scenario._supply / n0
    mean_demand = dynamic @ scenario._demand / n0
    lhs = float(n0 * (mean_supply * mean_demand).sum())
    krho0 = np.array(
        [c.kbar * c.incentive.efficiency(0.0) for c in scenario.classes]
    )
    mean_krho0 = float(dynamic @ krho0 / n0)
    rhs = math.inf if mean_krho0 == 0.0 else 1.0 / mean_krho0
    growth = float(
        (dynamic * scenario._kbars * scenario._rhos * (scenario._demand @ mean_supply)).sum()
        - 1.0
    )
    return ViabilityReport(
        lhs, rhs, rhs > 0.0 and lhs > rhs, necessary_value, necessary_holds, growth
    )
