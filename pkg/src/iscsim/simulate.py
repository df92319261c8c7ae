"""Monte Carlo simulation of the join/leave membership dynamics.

Time advances in synchronous rounds.  Joining probabilities are computed
once from the pre-round counts; then every outside peer of class c joins
with probability P_c and every member stays with probability P_c (leaves
with 1 - P_c), drawn as two binomials.  The expected one-round change
therefore equals the deterministic influx rate at the pre-round state.

Randomness comes from the counter-based Philox generator so that any
round of any run can be regenerated in isolation: round r and class c
draw from the substream keyed (seed, r * 2**32 + c), joins before stays.
A trace is a pure function of (scenario, config).

Classes excluded by endogenous contribution take no part: their counts
must start at zero and stay there.
"""

from __future__ import annotations

import csv
import hashlib
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .equilibrium import _dynamic_counts
from .model import (
    ClubState,
    ConstantIncentive,
    IncentiveFunction,
    Scenario,
    StateLike,
    _class_probabilities,
)

NUM_BATCHES = 20
"""Batches used for the batch-means standard error."""

_MAX_ROUNDS = 2**32 - 1  # round index must fit its substream key word


@dataclass(frozen=True)
class SimConfig:
    """Run length, warmup cutoff, seed, and optional starting state.

    initial_counts of None starts from full membership of the classes
    taking part in the dynamics.
    """

    rounds: int
    warmup: int = 0
    seed: int = 0
    initial_counts: ClubState | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.rounds <= _MAX_ROUNDS:
            raise ValueError(f"rounds must lie in [1, 2**32), got {self.rounds!r}")
        if not 0 <= self.warmup < self.rounds:
            raise ValueError(
                f"warmup must lie in [0, rounds), got {self.warmup!r}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Integer membership counts per round, row t being the state after t rounds."""

    counts: np.ndarray
    seed: int
    scenario_fingerprint: str

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] < 1:
            raise ValueError("trace counts must form a (rounds + 1, classes) array")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def rounds(self) -> int:
        return int(self.counts.shape[0] - 1)

    @property
    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def to_csv(self, path: Union[str, Path]) -> None:
        """Write `round,class_0,...,total` rows, one per recorded state."""
        classes = self.counts.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["round", *(f"class_{i}" for i in range(classes)), "total"]
            )
            for round_index, row in enumerate(self.counts):
                writer.writerow([round_index, *row.tolist(), int(row.sum())])


@dataclass(frozen=True, eq=False)
class EquilibriumEstimate:
    """Post-warmup time averages with batch-means standard errors."""

    means: np.ndarray
    stderrs: np.ndarray
    total_mean: float
    total_stderr: float


def _incentive_token(incentive: IncentiveFunction) -> str:
    if isinstance(incentive, ConstantIncentive):
        return f"constant({incentive.rho0!r})"
    return f"saturating({incentive.rho0!r},{incentive.rho_max!r},{incentive.beta!r})"


def scenario_fingerprint(scenario: Scenario) -> str:
    """Short stable digest of every parameter that shapes the dynamics."""
    pieces = [
        f"phi0={scenario.phi0!r}",
        f"endogenous={scenario.endogenous_contribution}",
        "seed=" + ",".join(repr(w) for w in scenario.seed_distribution.weights),
    ]
    for c in scenario.classes:
        pieces.append(
            "|".join(
                [
                    str(c.size),
                    ",".join(repr(w) for w in c.demand.weights),
                    ",".join(repr(w) for w in c.supply.weights),
                    repr(c.kbar),
                    repr(c.contribution),
                    _incentive_token(c.incentive),
                    repr(c.utility.a),
                    repr(c.utility.c),
                ]
            )
        )
    return hashlib.sha256(";".join(pieces).encode()).hexdigest()[:16]


class _PhiloxStreams:
    """Philox substreams keyed (seed, round * 2**32 + class), reset in place."""

    def __init__(self, seed: int):
        self._bitgen = np.random.Philox(key=np.array([seed, 0], dtype=np.uint64))
        self.generator = np.random.Generator(self._bitgen)
        self._template = self._bitgen.state

    def select(self, round_index: int, class_index: int) -> np.random.Generator:
        state = self._template
        state["state"]["key"][1] = (round_index << 32) | class_index
        state["state"]["counter"][:] = 0
        state["buffer_pos"] = 4  # force a fresh block for the new key
        self._bitgen.state = state
        return self.generator


def _int_counts(scenario: Scenario, state: StateLike) -> np.ndarray:
    counts = _dynamic_counts(scenario, state)
    rounded = np.rint(counts)
    if np.any(np.abs(counts - rounded) > 1e-9):
        raise ValueError("simulation counts must be integers")
    return rounded.astype(np.int64)


def _step_raw(
    scenario: Scenario,
    counts: np.ndarray,
    sizes: np.ndarray,
    streams: _PhiloxStreams,
    round_index: int,
) -> np.ndarray:
    probabilities = np.clip(
        _class_probabilities(scenario, counts.astype(float)), 0.0, 1.0
    )
    new_counts = np.empty_like(counts)
    for c in range(counts.size):
        p = probabilities[c]
        if p <= 0.0:
            # Nobody joins and every member leaves, with certainty; no
            # draws needed, so the substream stays untouched.
            new_counts[c] = 0
            continue
        gen = streams.select(round_index, c)
        joins = gen.binomial(int(sizes[c] - counts[c]), p)
        stays = gen.binomial(int(counts[c]), p)
        new_counts[c] = joins + stays
    return new_counts


def step(
    scenario: Scenario,
    counts: StateLike,
    *,
    seed: int,
    round_index: int = 0,
) -> ClubState:
    """One synchronous round from the given integer counts.

    The draws come from the substreams (seed, round_index, class), so
    stepping with the round indices 0..r-1 replays exactly what
    run() records, and distinct round indices give independent rounds.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit an unsigned 64-bit integer")
    if not 0 <= round_index <= _MAX_ROUNDS:
        raise ValueError(f"round_index must lie in [0, 2**32), got {round_index!r}")
    current = _int_counts(scenario, counts)
    sizes = np.rint(scenario._dynamic_sizes).astype(np.int64)
    streams = _PhiloxStreams(seed)
    return ClubState(
        _step_raw(scenario, current, sizes, streams, round_index).astype(float)
    )


def run(scenario: Scenario, config: SimConfig) -> SimTrace:
    """Simulate config.rounds rounds; the trace replays exactly per seed."""
    sizes = np.rint(scenario._dynamic_sizes).astype(np.int64)
    if config.initial_counts is None:
        current = sizes.copy()
    else:
        current = _int_counts(scenario, config.initial_counts)
    trace = np.empty((config.rounds + 1, current.size), dtype=np.int64)
    trace[0] = current
    streams = _PhiloxStreams(config.seed)
    for round_index in range(config.rounds):
        current = _step_raw(scenario, current, sizes, streams, round_index)
        trace[round_index + 1] = current
    return SimTrace(trace, config.seed, scenario_fingerprint(scenario))


def estimate_equilibrium(trace: SimTrace, warmup: int) -> EquilibriumEstimate:
    """Statistical-equilibrium estimate: post-warmup means with batch-means
    standard errors (20 batches).

    A trace that reaches the absorbing empty state has left statistical
    equilibrium, and averaging its dead tail would estimate the empty
    club instead.  The averaged window therefore ends at the last living
    round.  When the club's whole lifetime fits inside the configured
    warmup, the warmup shrinks to half the lifetime (the usual half-chain
    rule: the initial transient is over long before that).  A trace that
    never lived estimates the empty equilibrium (zero mean, zero error).
    The standard error splits the window into 20 equal batches (dropping
    any remainder at the end) and scales the spread of the batch means; a
    window too short even for one round per batch yields NaN errors with
    a warning.
    """
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup!r}")
    if trace.counts.shape[0] - warmup < NUM_BATCHES:
        raise ValueError(
            f"need at least {NUM_BATCHES} post-warmup rounds, "
            f"got {trace.counts.shape[0] - warmup}"
        )
    classes = trace.counts.shape[1]
    alive = np.nonzero(trace.totals > 0)[0]
    last_alive = int(alive[-1]) if alive.size else -1
    if last_alive < 0:
        zeros = np.zeros(classes)
        return EquilibriumEstimate(zeros, zeros.copy(), 0.0, 0.0)
    if last_alive - warmup + 1 < NUM_BATCHES:
        warmup = (last_alive + 1) // 2
    samples = trace.counts[warmup : last_alive + 1]
    means = samples.mean(axis=0)
    totals = samples.sum(axis=1)
    batch_len = samples.shape[0] // NUM_BATCHES
    if batch_len == 0:
        warnings.warn(
            "living post-warmup window shorter than one round per batch; "
            "standard errors are undefined",
            stacklevel=2,
        )
        nans = np.full(classes, np.nan)
        return EquilibriumEstimate(means, nans, float(totals.mean()), math.nan)
    batched = samples[: NUM_BATCHES * batch_len].reshape(
        NUM_BATCHES, batch_len, classes
    )
    batch_means = batched.mean(axis=1)
    stderrs = batch_means.std(axis=0, ddof=1) / np.sqrt(NUM_BATCHES)
    total_batch_means = batch_means.sum(axis=1)
    total_stderr = float(total_batch_means.std(ddof=1) / np.sqrt(NUM_BATCHES))
    return EquilibriumEstimate(means, stderrs, float(totals.mean()), total_stderr)
