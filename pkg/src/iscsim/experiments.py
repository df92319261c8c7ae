"""Club-mixing experiments: two-population scenario builders and q-sweeps.

The two-population family has two goods types.  Class 1 demands type-1
goods only and supplies mostly type-1 with a fraction q spilling into
type-2; class 2 is the mirror image.  Every peer carries kbar = 1 of
content under a constant incentive rho0 = kappa, so each member adds
kappa to every other member's discovery exponent.

The mixing sweep compares the equilibrium sizes of the two clubs formed
separately against the single mixed club and reports the size gain.  The
rescue sweep fixes the total population, shrinks class 2 below viability,
and tracks how many class-2 peers the mixed club still carries as the
overlap q grows.

Stochastic rows estimate the same quantities from simulation traces via
batch means; each row's runs draw their seeds from the master seed with
numpy's SeedSequence spawn keys (row index, run slot), so sweeps are
reproducible and rows are independent.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .equilibrium import ConvergenceError, check_viability, solve_equilibrium
from .model import ConstantIncentive, GoodsDistribution, PeerClass, Scenario
from .simulate import SimConfig, estimate_equilibrium, run

DEFAULT_KAPPA = 0.015
DEFAULT_CLASS_SIZE = 100
DEFAULT_TOTAL_SIZE = 200
DEFAULT_N2_VALUES = (40, 50, 60)
DEFAULT_SIM_ROUNDS = 20_000
DEFAULT_SIM_WARMUP = 5_000

FIG2_HEADER = ("q", "n1", "n2", "n_mixed", "gain")
FIG3_HEADER = ("q", "N2", "type2_participation")


@dataclass(frozen=True)
class MixSweepRow:
    """One overlap point: separate-club sizes, mixed size, and the gain."""

    q: float
    n1: float
    n2: float
    n_mixed: float
    gain: float
    n1_stderr: float = 0.0
    n2_stderr: float = 0.0
    n_mixed_stderr: float = 0.0
    gain_stderr: float = 0.0


@dataclass(frozen=True)
class RescueSweepRow:
    """Participation of the non-viable class 2 in the mixed club."""

    q: float
    n2_population: int
    type2_participation: float
    participation_stderr: float = 0.0


def default_q_grid(q_max: float = 0.20, steps: int = 21) -> np.ndarray:
    """Evenly spaced overlap grid from 0 to q_max."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps!r}")
    if not 0.0 <= q_max <= 0.5:
        raise ValueError(f"q_max must lie in [0, 0.5], got {q_max!r}")
    return np.linspace(0.0, q_max, steps)


def _overlap_supply(q: float, peer_type: int) -> GoodsDistribution:
    if peer_type == 1:
        return GoodsDistribution([1.0 - q, q])
    return GoodsDistribution([q, 1.0 - q])


def _pure_demand(peer_type: int) -> GoodsDistribution:
    if peer_type == 1:
        return GoodsDistribution([1.0, 0.0])
    return GoodsDistribution([0.0, 1.0])


def _check_build_args(q: float, kappa: float) -> None:
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"q must lie in [0, 0.5], got {q!r}")
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa!r}")


def build_two_type_scenario(
    q: float,
    size1: int = DEFAULT_CLASS_SIZE,
    size2: int = DEFAULT_CLASS_SIZE,
    kappa: float = DEFAULT_KAPPA,
    phi0: float = 0.0,
) -> Scenario:
    """Both populations in one mixed club.

    Class 1: demand {1, 0}, supply {1 - q, q}; class 2 mirrored.
    """
    _check_build_args(q, kappa)
    classes = tuple(
        PeerClass(
            size=size,
            demand=_pure_demand(peer_type),
            supply=_overlap_supply(q, peer_type),
            kbar=1.0,
            incentive=ConstantIncentive(kappa),
        )
        for peer_type, size in ((1, size1), (2, size2))
    )
    return Scenario(classes=classes, phi0=phi0)


def build_one_type_scenario(
    q: float,
    size: int = DEFAULT_CLASS_SIZE,
    kappa: float = DEFAULT_KAPPA,
    phi0: float = 0.0,
    peer_type: int = 1,
) -> Scenario:
    """One population forming its club alone, over the same two-good domain."""
    _check_build_args(q, kappa)
    if peer_type not in (1, 2):
        raise ValueError(f"peer_type must be 1 or 2, got {peer_type!r}")
    peer_class = PeerClass(
        size=size,
        demand=_pure_demand(peer_type),
        supply=_overlap_supply(q, peer_type),
        kbar=1.0,
        incentive=ConstantIncentive(kappa),
    )
    return Scenario(classes=(peer_class,), phi0=phi0)


def _check_mode(mode: str) -> None:
    if mode not in ("deterministic", "stochastic"):
        raise ValueError(
            f"mode must be 'deterministic' or 'stochastic', got {mode!r}"
        )


def _derived_seed(master_seed: int, row_index: int, slot: int) -> int:
    sequence = np.random.SeedSequence(master_seed, spawn_key=(row_index, slot))
    return int(sequence.generate_state(1, np.uint64)[0])


def _equilibrium_counts(
    scenario: Scenario,
    mode: str,
    sim_config: SimConfig,
    seed: int,
    q: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class equilibrium means and standard errors for one run."""
    if mode == "deterministic":
        try:
            solution = solve_equilibrium(scenario)
        except ConvergenceError as error:
            raise ConvergenceError(
                f"solver did not converge at q={q!r}: {error}",
                error.counts,
                error.residual,
                error.iterations,
            ) from error
        return solution.per_class, np.zeros(len(scenario.classes))
    trace = run(scenario, replace(sim_config, seed=seed))
    estimate = estimate_equilibrium(trace, sim_config.warmup)
    return estimate.means, estimate.stderrs


def _default_sim_config(sim_config: SimConfig | None) -> SimConfig:
    if sim_config is None:
        return SimConfig(rounds=DEFAULT_SIM_ROUNDS, warmup=DEFAULT_SIM_WARMUP)
    return sim_config


def _warn_if(condition: bool, message: str) -> None:
    if condition:
        warnings.warn(message, stacklevel=3)


def mixing_gain_sweep(
    q_values: Sequence[float],
    size1: int = DEFAULT_CLASS_SIZE,
    size2: int = DEFAULT_CLASS_SIZE,
    kappa: float = DEFAULT_KAPPA,
    mode: str = "deterministic",
    sim_config: SimConfig | None = None,
) -> list[MixSweepRow]:
    """Separate-versus-mixed club sizes across the overlap grid.

    For each q, the two clubs are formed separately (each class alone)
    and jointly; gain = n_mixed / (n1 + n2).  Warns when a separate club
    fails the sufficient viability condition, since the gain loses its
    meaning there.  In stochastic mode sim_config.seed is the master seed
    for the whole sweep.
    """
    _check_mode(mode)
    sim_config = _default_sim_config(sim_config)
    rows = []
    for row_index, q in enumerate(q_values):
        q = float(q)
        separate1 = build_one_type_scenario(q, size1, kappa, peer_type=1)
        separate2 = build_one_type_scenario(q, size2, kappa, peer_type=2)
        mixed = build_two_type_scenario(q, size1, size2, kappa)
        for label, scenario in (("1", separate1), ("2", separate2)):
            _warn_if(
                not check_viability(scenario).sufficient_holds,
                f"class-{label} club alone is not viable at q={q:g}",
            )
        runs = []
        for slot, scenario in enumerate((separate1, separate2, mixed)):
            seed = _derived_seed(sim_config.seed, row_index, slot)
            runs.append(_equilibrium_counts(scenario, mode, sim_config, seed, q))
        n1, se1 = float(runs[0][0].sum()), float(runs[0][1].sum())
        n2, se2 = float(runs[1][0].sum()), float(runs[1][1].sum())
        n_mixed = float(runs[2][0].sum())
        se_mixed = float(np.sqrt((runs[2][1] ** 2).sum()))
        separate_total = n1 + n2
        if separate_total > 0.0:
            gain = n_mixed / separate_total
            se_separate = math.hypot(se1, se2)
            gain_stderr = (
                abs(gain)
                * math.hypot(
                    se_mixed / n_mixed if n_mixed > 0.0 else 0.0,
                    se_separate / separate_total,
                )
            )
        else:
            gain = math.nan
            gain_stderr = math.nan
        rows.append(
            MixSweepRow(q, n1, n2, n_mixed, gain, se1, se2, se_mixed, gain_stderr)
        )
    return rows


def nonviable_rescue_sweep(
    q_values: Sequence[float],
    n2_values: Sequence[int] = DEFAULT_N2_VALUES,
    total_size: int = DEFAULT_TOTAL_SIZE,
    kappa: float = DEFAULT_KAPPA,
    mode: str = "deterministic",
    sim_config: SimConfig | None = None,
) -> list[RescueSweepRow]:
    """Class-2 participation in the mixed club as overlap rescues it.

    The total population stays at total_size; each N2 in n2_values sets
    class 2's share (class 1 gets the rest).  Warns if some N2 would be
    viable on its own, since the point of the sweep is rescue.  Rows come
    out q-major in the given value order.
    """
    _check_mode(mode)
    sim_config = _default_sim_config(sim_config)
    rows = []
    row_index = 0
    for q in q_values:
        q = float(q)
        for n2 in n2_values:
            n2 = int(n2)
            if not 0 <= n2 <= total_size:
                raise ValueError(f"N2 must lie in [0, total_size], got {n2!r}")
            alone = build_one_type_scenario(q, n2, kappa, peer_type=2)
            _warn_if(
                check_viability(alone).sufficient_holds,
                f"class 2 with N2={n2} is viable alone at q={q:g}; "
                "nothing to rescue",
            )
            mixed = build_two_type_scenario(q, total_size - n2, n2, kappa)
            seed = _derived_seed(sim_config.seed, row_index, 0)
            means, stderrs = _equilibrium_counts(mixed, mode, sim_config, seed, q)
            rows.append(
                RescueSweepRow(q, n2, float(means[1]), float(stderrs[1]))
            )
            row_index += 1
    return rows


def _format_value(value: float) -> str:
    return format(value, ".6g")


def write_fig2_csv(rows: Sequence[MixSweepRow], path: Union[str, Path]) -> None:
    """Mixing-gain sweep as `q,n1,n2,n_mixed,gain`, 6 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIG2_HEADER)
        for row in rows:
            writer.writerow(
                [
                    _format_value(row.q),
                    _format_value(row.n1),
                    _format_value(row.n2),
                    _format_value(row.n_mixed),
                    _format_value(row.gain),
                ]
            )


def write_fig3_csv(rows: Sequence[RescueSweepRow], path: Union[str, Path]) -> None:
    """Rescue sweep as `q,N2,type2_participation`, 6 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIG3_HEADER)
        for row in rows:
            writer.writerow(
                [
                    _format_value(row.q),
                    _format_value(float(row.n2_population)),
                    _format_value(row.type2_participation),
                ]
            )
