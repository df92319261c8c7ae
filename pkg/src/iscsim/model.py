"""Core types and pointwise equations of the information-sharing-club model.

Peers are grouped into homogeneous classes.  Each class has a demand
distribution h(s) and a supply distribution g(s) over a shared domain of
goods types, a potential contribution per member (kbar), a chosen
contribution level K, an incentive curve rho(K) mapping contribution to
search efficiency, and linear utility coefficients whose ratio is the
propensity-to-contribute Gamma = a / c.

With n_c members of class c in the club, the club holds

    m(s) = sum_c n_c * kbar_c * g_c(s) + phi0 * seed(s)

units of type-s content (phi0 is seed content present without any
members).  A class-c peer finds something it wants, and hence joins or
stays, with probability

    P_c = sum_s h_c(s) * (1 - exp(-rho(K_c) * m(s))).

Everything in this module is a pure function of immutable values; the
dynamic layers (equilibrium solving, stochastic simulation) reuse the
vectorized kernels at the bottom of the file.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

SUM_TOLERANCE = 1e-12
"""Absolute tolerance for probability weights summing to one."""


def _read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class GoodsDistribution:
    """Probability weights over the goods-type domain."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must form a non-empty 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        object.__setattr__(self, "weights", _read_only(w.copy()))

    @classmethod
    def uniform(cls, size: int) -> "GoodsDistribution":
        if size < 1:
            raise ValueError("goods domain needs at least one type")
        return cls(np.full(size, 1.0 / size))

    @property
    def size(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class ConstantIncentive:
    """Search efficiency pinned at rho0, independent of contribution."""

    rho0: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho0 <= 1.0:
            raise ValueError(f"rho0 must lie in [0, 1], got {self.rho0!r}")

    def efficiency(self, contribution: float) -> float:
        return self.rho0

    def efficiency_derivative(self, contribution: float) -> float:
        return 0.0


@dataclass(frozen=True)
class SaturatingIncentive:
    """Search efficiency rho0 + (rho_max - rho0) * (1 - e^{-beta K}).

    Rises from rho0 at zero contribution toward rho_max, with initial
    slope (rho_max - rho0) * beta.
    """

    rho0: float
    rho_max: float
    beta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho0 <= 1.0:
            raise ValueError(f"rho0 must lie in [0, 1], got {self.rho0!r}")
        if not self.rho0 <= self.rho_max <= 1.0:
            raise ValueError(
                f"rho_max must lie in [rho0, 1], got {self.rho_max!r}"
            )
        if not 0.0 <= self.beta < math.inf:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")

    # Both methods accept slightly negative arguments so finite-difference
    # stencils centered at zero contribution stay well defined.
    def efficiency(self, contribution: float) -> float:
        span = self.rho_max - self.rho0
        return self.rho0 + span * (1.0 - math.exp(-self.beta * contribution))

    def efficiency_derivative(self, contribution: float) -> float:
        span = self.rho_max - self.rho0
        return span * self.beta * math.exp(-self.beta * contribution)


IncentiveFunction = Union[ConstantIncentive, SaturatingIncentive]


@dataclass(frozen=True)
class UtilityModel:
    """Locally linear utility: benefit worth a per unit, contribution costing c."""

    a: float = 1.0
    c: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.a < math.inf:
            raise ValueError(f"a must be finite and positive, got {self.a!r}")
        if not 0.0 < self.c < math.inf:
            raise ValueError(f"c must be finite and positive, got {self.c!r}")

    def propensity_to_contribute(self) -> float:
        """Gamma, the benefit-per-contribution exchange rate at zero contribution."""
        return self.a / self.c


@dataclass(frozen=True, eq=False)
class PeerClass:
    """A homogeneous sub-population of peers."""

    size: int
    demand: GoodsDistribution
    supply: GoodsDistribution
    kbar: float
    incentive: IncentiveFunction
    contribution: float = 0.0
    utility: UtilityModel = UtilityModel()

    def __post_init__(self) -> None:
        if not isinstance(self.size, (int, np.integer)) or self.size < 0:
            raise ValueError(f"size must be a non-negative integer, got {self.size!r}")
        if self.demand.size != self.supply.size:
            raise ValueError("demand and supply must cover the same goods domain")
        if not 0.0 <= self.kbar < math.inf:
            raise ValueError(f"kbar must be finite and >= 0, got {self.kbar!r}")
        if not 0.0 <= self.contribution < math.inf:
            raise ValueError(
                f"contribution must be finite and >= 0, got {self.contribution!r}"
            )
        if not isinstance(self.incentive, (ConstantIncentive, SaturatingIncentive)):
            raise ValueError("incentive must be a ConstantIncentive or SaturatingIncentive")


@dataclass(frozen=True, eq=False)
class Scenario:
    """A full model instance: peer classes over one goods domain plus seed content.

    seed_distribution defaults to uniform over the goods domain.  When
    endogenous_contribution is true, classes whose members would not
    contribute at the empty club (see is_contributor) are excluded from
    the membership dynamics; the pointwise operations in this module are
    unaffected by the flag.
    """

    classes: tuple[PeerClass, ...]
    phi0: float = 0.0
    seed_distribution: GoodsDistribution | None = None
    endogenous_contribution: bool = False

    def __post_init__(self) -> None:
        classes = tuple(self.classes)
        if not classes:
            raise ValueError("scenario needs at least one peer class")
        goods = {c.demand.size for c in classes}
        if len(goods) != 1:
            raise ValueError("all classes must share one goods domain")
        if not 0.0 <= self.phi0 < math.inf:
            raise ValueError(f"phi0 must be finite and >= 0, got {self.phi0!r}")
        seed = self.seed_distribution
        if seed is None:
            seed = GoodsDistribution.uniform(classes[0].demand.size)
        elif seed.size != classes[0].demand.size:
            raise ValueError("seed distribution does not match the goods domain")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "seed_distribution", seed)

    @property
    def goods_count(self) -> int:
        return self.classes[0].demand.size

    @property
    def population(self) -> int:
        return int(sum(c.size for c in self.classes))

    def index_of(self, peer_class: PeerClass) -> int:
        for i, c in enumerate(self.classes):
            if c is peer_class:
                return i
        raise ValueError("class does not belong to this scenario")

    # Derived arrays, built once and shared by the numeric kernels.

    @cached_property
    def _sizes(self) -> np.ndarray:
        return _read_only(np.array([c.size for c in self.classes], dtype=float))

    @cached_property
    def _kbars(self) -> np.ndarray:
        return _read_only(np.array([c.kbar for c in self.classes], dtype=float))

    @cached_property
    def _rhos(self) -> np.ndarray:
        """Search efficiency of each class at its configured contribution."""
        return _read_only(
            np.array([c.incentive.efficiency(c.contribution) for c in self.classes])
        )

    @cached_property
    def _demand(self) -> np.ndarray:
        return _read_only(np.vstack([c.demand.weights for c in self.classes]))

    @cached_property
    def _supply(self) -> np.ndarray:
        return _read_only(np.vstack([c.supply.weights for c in self.classes]))

    @cached_property
    def _seed_quantity(self) -> np.ndarray:
        """Per-type content present without any members, phi0 * seed(s)."""
        return _read_only(self.phi0 * self.seed_distribution.weights)

    @cached_property
    def _contributor_mask(self) -> np.ndarray:
        """Classes taking part in the dynamics, decided once at the empty club."""
        if not self.endogenous_contribution:
            mask = np.ones(len(self.classes), dtype=bool)
        else:
            empty = np.zeros(len(self.classes))
            mask = np.array(
                [
                    _response(self, empty, c, 0.0) * c.utility.propensity_to_contribute()
                    > 1.0
                    for c in self.classes
                ]
            )
        return _read_only(mask)

    @cached_property
    def _dynamic_sizes(self) -> np.ndarray:
        """Class sizes with non-contributing classes zeroed out."""
        return _read_only(self._sizes * self._contributor_mask)


@dataclass(frozen=True, eq=False)
class ClubState:
    """Per-class in-club counts; real-valued for the deterministic solver."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 1 or counts.size == 0:
            raise ValueError("counts must form a non-empty 1-d vector")
        if not np.all(np.isfinite(counts)):
            raise ValueError("counts must be finite")
        if np.any(counts < 0.0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", _read_only(counts.copy()))

    @property
    def total(self) -> float:
        return float(self.counts.sum())


StateLike = Union[ClubState, Sequence[float], np.ndarray]


def _counts_for(scenario: Scenario, state: StateLike) -> np.ndarray:
    """Validated count vector for scenario: right length, inside [0, N_c]."""
    counts = state.counts if isinstance(state, ClubState) else ClubState(state).counts
    if counts.size != len(scenario.classes):
        raise ValueError(
            f"state covers {counts.size} classes, scenario has {len(scenario.classes)}"
        )
    if np.any(counts > scenario._sizes):
        raise ValueError("in-club counts exceed class sizes")
    return counts


def phi(scenario: Scenario, state: StateLike) -> float:
    """Total quantity of content in the club, sum_c n_c * kbar_c + phi0."""
    counts = _counts_for(scenario, state)
    return float(counts @ scenario._kbars + scenario.phi0)


def content_mix(scenario: Scenario, state: StateLike) -> GoodsDistribution:
    """Distribution of club content over goods types.

    Members' supplies are weighted by the content they bring (count times
    kbar) and blended with the seed content.  An empty club without seed
    content has no content at all; the seed distribution is returned as
    the inert placeholder (joining probabilities are zero regardless).
    """
    counts = _counts_for(scenario, state)
    m = _content_vector(scenario, counts)
    total = float(m.sum())
    if total == 0.0:
        return scenario.seed_distribution
    return GoodsDistribution(m / total)


def joining_probability(
    peer_class: PeerClass, scenario: Scenario, state: StateLike
) -> float:
    """Probability that a class member finds content it demands, hence joins."""
    index = scenario.index_of(peer_class)
    counts = _counts_for(scenario, state)
    return float(_class_probabilities(scenario, counts)[index])


def mean_joining_probability(scenario: Scenario, state: StateLike) -> float:
    """Population-weighted average joining probability."""
    counts = _counts_for(scenario, state)
    population = scenario._sizes.sum()
    if population == 0.0:
        raise ValueError("mean joining probability is undefined without any peers")
    probs = _class_probabilities(scenario, counts)
    return float(scenario._sizes @ probs / population)


def club_response(
    peer_class: PeerClass, scenario: Scenario, state: StateLike
) -> float:
    """Marginal benefit gain per unit of one peer's contribution.

    The derivative of the peer's joining probability in its contribution
    level, holding club content fixed (one peer's contribution does not
    move the aggregate): rho'(K) * sum_s h(s) * m(s) * e^{-rho(K) m(s)}.
    """
    scenario.index_of(peer_class)
    counts = _counts_for(scenario, state)
    return _response(scenario, counts, peer_class, peer_class.contribution)


def is_contributor(
    peer_class: PeerClass, scenario: Scenario, state: StateLike
) -> bool:
    """Whether a rational class member contributes rather than free-rides.

    True when the club response at zero contribution beats the peer's
    cost of contributing: response * Gamma > 1.
    """
    scenario.index_of(peer_class)
    counts = _counts_for(scenario, state)
    response = _response(scenario, counts, peer_class, 0.0)
    return bool(response * peer_class.utility.propensity_to_contribute() > 1.0)


# Vectorized kernels.  These skip state validation and never clip, so the
# dynamic layers can evaluate finite-difference stencils slightly outside
# the domain (negative counts near the empty club).


def _content_vector(scenario: Scenario, counts: np.ndarray) -> np.ndarray:
    """Per-type content quantity m(s); sums to phi(state)."""
    return (counts * scenario._kbars) @ scenario._supply + scenario._seed_quantity


def _class_probabilities(scenario: Scenario, counts: np.ndarray) -> np.ndarray:
    """Joining probability of every class at the given raw counts."""
    m = _content_vector(scenario, counts)
    exponents = scenario._rhos[:, None] * m[None, :]
    return ((1.0 - np.exp(-exponents)) * scenario._demand).sum(axis=1)


def _response(
    scenario: Scenario,
    counts: np.ndarray,
    peer_class: PeerClass,
    contribution: float,
) -> float:
    m = _content_vector(scenario, counts)
    rho = peer_class.incentive.efficiency(contribution)
    slope = peer_class.incentive.efficiency_derivative(contribution)
    h = peer_class.demand.weights
    return float(slope * (h * m * np.exp(-rho * m)).sum())
