"""Information-sharing-club formation model.

Library layout:

- model: domain types and the pointwise equations (content, joining
  probability, contribution decision).
- equilibrium: influx rates, fixed-point solving, stability, viability.
- simulate: Monte Carlo join/leave dynamics with reproducible streams.
- experiments: two-population mixing and rescue sweeps plus CSV export.
- scenario_io: JSON scenario documents.
- cli: the `iscsim` command.
"""

from .equilibrium import (
    ConvergenceError,
    EquilibriumSolution,
    Influx,
    ViabilityReport,
    check_viability,
    classify_stability,
    influx_rate,
    solve_equilibrium,
)
from .experiments import (
    MixSweepRow,
    RescueSweepRow,
    build_one_type_scenario,
    build_two_type_scenario,
    default_q_grid,
    mixing_gain_sweep,
    nonviable_rescue_sweep,
    write_fig2_csv,
    write_fig3_csv,
)
from .model import (
    SUM_TOLERANCE,
    ClubState,
    ConstantIncentive,
    GoodsDistribution,
    IncentiveFunction,
    PeerClass,
    SaturatingIncentive,
    Scenario,
    UtilityModel,
    club_response,
    content_mix,
    is_contributor,
    joining_probability,
    mean_joining_probability,
    phi,
)
from .scenario_io import ScenarioFormatError, load_scenario, scenario_from_document
from .simulate import (
    EquilibriumEstimate,
    SimConfig,
    SimTrace,
    estimate_equilibrium,
    scenario_fingerprint,
)

__all__ = [
    "SUM_TOLERANCE",
    "ClubState",
    "ConstantIncentive",
    "ConvergenceError",
    "EquilibriumEstimate",
    "EquilibriumSolution",
    "GoodsDistribution",
    "IncentiveFunction",
    "Influx",
    "MixSweepRow",
    "PeerClass",
    "RescueSweepRow",
    "SaturatingIncentive",
    "Scenario",
    "ScenarioFormatError",
    "SimConfig",
    "SimTrace",
    "UtilityModel",
    "ViabilityReport",
    "build_one_type_scenario",
    "build_two_type_scenario",
    "check_viability",
    "classify_stability",
    "club_response",
    "content_mix",
    "default_q_grid",
    "estimate_equilibrium",
    "influx_rate",
    "is_contributor",
    "joining_probability",
    "load_scenario",
    "mean_joining_probability",
    "mixing_gain_sweep",
    "nonviable_rescue_sweep",
    "phi",
    "scenario_fingerprint",
    "scenario_from_document",
    "solve_equilibrium",
    "write_fig2_csv",
    "write_fig3_csv",
]
