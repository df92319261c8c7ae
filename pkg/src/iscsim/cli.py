"""Command-line front end.

Subcommands: solve, viability, simulate, fig2, fig3.  Scenario documents
are JSON files (see scenario_io).  Exit codes: 0 on success, 1 for input
problems (bad flags, unreadable or invalid documents), 2 for numeric
failures (solver non-convergence).  Output is deterministic: identical
invocations write byte-identical files and stdout.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .equilibrium import ConvergenceError, check_viability, solve_equilibrium
from .experiments import (
    default_q_grid,
    mixing_gain_sweep,
    nonviable_rescue_sweep,
    write_fig2_csv,
    write_fig3_csv,
)
from .scenario_io import load_scenario
from .simulate import SimConfig, estimate_equilibrium, run


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the input-error code."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    return repr(float(value))


def _bool_str(value: bool) -> str:
    return "true" if value else "false"


def _add_scenario_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="path to a scenario JSON document")


def _add_sim_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--rounds", type=int, default=20_000, help="simulation rounds (default 20000)"
    )
    parser.add_argument(
        "--warmup",
        type=int,
        default=5_000,
        help="rounds discarded before averaging (default 5000)",
    )
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")


def _add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--q-max", type=float, default=0.20, help="largest overlap (default 0.20)"
    )
    parser.add_argument(
        "--steps", type=int, default=21, help="grid points from 0 to q-max (default 21)"
    )
    parser.add_argument(
        "--mode",
        choices=("deterministic", "stochastic"),
        default="deterministic",
        help="solve the fixed point or estimate it by simulation",
    )
    _add_sim_arguments(parser)
    parser.add_argument("--out", required=True, help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="iscsim",
        description="Information-sharing-club formation model: "
        "equilibria, viability, simulation, and club-mixing sweeps.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve the membership fixed point")
    _add_scenario_argument(solve)
    solve.add_argument(
        "--tol", type=float, default=1e-9, help="residual tolerance (default 1e-9)"
    )
    solve.add_argument(
        "--max-iter",
        type=int,
        default=1_000_000,
        help="iteration budget (default 1000000)",
    )
    solve.set_defaults(handler=_cmd_solve)

    viability = commands.add_parser(
        "viability", help="evaluate both empty-club viability conditions"
    )
    _add_scenario_argument(viability)
    viability.set_defaults(handler=_cmd_viability)

    simulate = commands.add_parser(
        "simulate", help="simulate the join/leave dynamics and estimate equilibrium"
    )
    _add_scenario_argument(simulate)
    _add_sim_arguments(simulate)
    simulate.add_argument("--out", required=True, help="trace CSV path")
    simulate.set_defaults(handler=_cmd_simulate)

    fig2 = commands.add_parser(
        "fig2", help="mixing-gain sweep: separate versus mixed club sizes"
    )
    _add_sweep_arguments(fig2)
    fig2.set_defaults(handler=_cmd_fig2)

    fig3 = commands.add_parser(
        "fig3", help="rescue sweep: participation of a non-viable class"
    )
    fig3.add_argument(
        "--n2",
        default="40,50,60",
        help="comma-separated class-2 populations (default 40,50,60)",
    )
    _add_sweep_arguments(fig3)
    fig3.set_defaults(handler=_cmd_fig3)

    return parser


def _cmd_solve(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.config)
    solution = solve_equilibrium(scenario, tol=args.tol, max_iter=args.max_iter)
    for i, (count, peer_class) in enumerate(
        zip(solution.per_class, scenario.classes)
    ):
        print(f"class_{i}: n={_fmt(count)} (N={peer_class.size})")
    print(f"residual={_fmt(solution.residual)}")
    print(f"stable={_bool_str(solution.stable)}")
    print(f"n_total={_fmt(solution.total)}")
    return 0


def _cmd_viability(args: argparse.Namespace) -> int:
    report = check_viability(load_scenario(args.config))
    print(f"sufficient_lhs={_fmt(report.sufficient_lhs)}")
    print(f"sufficient_rhs={_fmt(report.sufficient_rhs)}")
    print(f"necessary_value={_fmt(report.necessary_value)}")
    print(f"empty_club_growth_rate={_fmt(report.empty_club_growth_rate)}")
    print(f"sufficient={_bool_str(report.sufficient_holds)}")
    print(f"necessary={_bool_str(report.necessary_holds)}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.config)
    if args.rounds < args.warmup + 20:
        raise ValueError(
            "rounds must be at least warmup + 20 "
            "(the batch-means estimate needs 20 post-warmup rounds)"
        )
    config = SimConfig(rounds=args.rounds, warmup=args.warmup, seed=args.seed)
    trace = run(scenario, config)
    trace.to_csv(args.out)
    estimate = estimate_equilibrium(trace, config.warmup)
    for i, (mean, stderr) in enumerate(zip(estimate.means, estimate.stderrs)):
        print(f"class_{i}: mean={_fmt(mean)} stderr={_fmt(stderr)}")
    print(f"mean_total={_fmt(estimate.total_mean)}")
    print(f"stderr_total={_fmt(estimate.total_stderr)}")
    print(f"wrote {args.out}")
    return 0


def _sweep_sim_config(args: argparse.Namespace) -> SimConfig:
    if args.rounds < args.warmup + 20:
        raise ValueError(
            "rounds must be at least warmup + 20 "
            "(the batch-means estimate needs 20 post-warmup rounds)"
        )
    return SimConfig(rounds=args.rounds, warmup=args.warmup, seed=args.seed)


def _cmd_fig2(args: argparse.Namespace) -> int:
    q_values = default_q_grid(args.q_max, args.steps)
    rows = mixing_gain_sweep(
        q_values, mode=args.mode, sim_config=_sweep_sim_config(args)
    )
    write_fig2_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_fig3(args: argparse.Namespace) -> int:
    try:
        n2_values = tuple(int(part) for part in args.n2.split(","))
    except ValueError:
        raise ValueError(
            f"--n2 expects comma-separated integers, got {args.n2!r}"
        ) from None
    q_values = default_q_grid(args.q_max, args.steps)
    rows = nonviable_rescue_sweep(
        q_values, n2_values, mode=args.mode, sim_config=_sweep_sim_config(args)
    )
    write_fig3_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:  # argparse handles usage errors and --help
        code = exit_.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    try:
        return args.handler(args)
    except ConvergenceError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
