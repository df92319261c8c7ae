"""Scenario documents: JSON ingestion with field-precise validation.

A document looks like

    {
      "goods": 2,
      "phi0": 0.0,
      "seed_distribution": [0.5, 0.5],
      "endogenous_contribution": false,
      "classes": [
        {
          "n": 100,
          "demand": [1.0, 0.0],
          "supply": [0.8, 0.2],
          "kbar": 1.0,
          "contribution": 0.0,
          "incentive": {"kind": "constant", "rho0": 0.015},
          "utility": {"a": 1.0, "c": 1.0}
        }
      ]
    }

`goods` and `classes` are required, as are `n`, `demand`, `supply`,
`kbar`, and `incentive` within each class.  `phi0` defaults to 0,
`seed_distribution` to uniform, `endogenous_contribution` to false,
`contribution` to 0, and `utility` to a = c = 1.  A saturating incentive
takes {"kind": "saturating", "rho0": ..., "rho_max": ..., "beta": ...}.

Every rejection raises ScenarioFormatError with the offending field's
path, e.g. `classes[0].supply: weights sum to 0.9, expected 1`.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .model import (
    ConstantIncentive,
    GoodsDistribution,
    IncentiveFunction,
    PeerClass,
    SaturatingIncentive,
    Scenario,
    UtilityModel,
)


class ScenarioFormatError(ValueError):
    """Scenario document rejected; the message names the offending field."""


def _fail(path: str, message: str) -> None:
    raise ScenarioFormatError(f"{path}: {message}")


def _as_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in obj:
        if key not in allowed:
            _fail(path, f"unexpected key '{key}' (allowed: {', '.join(allowed)})")


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        _fail(path, f"missing required key '{key}'")
    return obj[key]


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        _fail(path, f"expected true or false, got {value!r}")
    return value


def _as_int(value: Any, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if value < minimum:
        _fail(path, f"must be >= {minimum}, got {value!r}")
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


def _as_distribution(value: Any, path: str, goods: int) -> GoodsDistribution:
    if not isinstance(value, list):
        _fail(path, f"expected an array of {goods} numbers")
    if len(value) != goods:
        _fail(path, f"expected {goods} entries, got {len(value)}")
    weights = [_as_number(entry, f"{path}[{i}]") for i, entry in enumerate(value)]
    try:
        return GoodsDistribution(weights)
    except ValueError as error:
        _fail(path, str(error))


def _as_incentive(value: Any, path: str) -> IncentiveFunction:
    obj = _as_object(value, path)
    kind = _require(obj, "kind", path)
    try:
        if kind == "constant":
            _reject_unknown(obj, ("kind", "rho0"), path)
            return ConstantIncentive(_as_number(_require(obj, "rho0", path), f"{path}.rho0"))
        if kind == "saturating":
            _reject_unknown(obj, ("kind", "rho0", "rho_max", "beta"), path)
            return SaturatingIncentive(
                _as_number(_require(obj, "rho0", path), f"{path}.rho0"),
                _as_number(_require(obj, "rho_max", path), f"{path}.rho_max"),
                _as_number(_require(obj, "beta", path), f"{path}.beta"),
            )
    except ValueError as error:
        if isinstance(error, ScenarioFormatError):
            raise
        _fail(path, str(error))
    _fail(f"{path}.kind", f"must be 'constant' or 'saturating', got {kind!r}")


def _as_utility(value: Any, path: str) -> UtilityModel:
    obj = _as_object(value, path)
    _reject_unknown(obj, ("a", "c"), path)
    try:
        return UtilityModel(
            _as_number(_require(obj, "a", path), f"{path}.a"),
            _as_number(_require(obj, "c", path), f"{path}.c"),
        )
    except ValueError as error:
        if isinstance(error, ScenarioFormatError):
            raise
        _fail(path, str(error))


def _as_peer_class(value: Any, path: str, goods: int) -> PeerClass:
    obj = _as_object(value, path)
    _reject_unknown(
        obj,
        ("n", "demand", "supply", "kbar", "contribution", "incentive", "utility"),
        path,
    )
    size = _as_int(_require(obj, "n", path), f"{path}.n")
    demand = _as_distribution(_require(obj, "demand", path), f"{path}.demand", goods)
    supply = _as_distribution(_require(obj, "supply", path), f"{path}.supply", goods)
    kbar = _as_number(_require(obj, "kbar", path), f"{path}.kbar")
    contribution = (
        _as_number(obj["contribution"], f"{path}.contribution")
        if "contribution" in obj
        else 0.0
    )
    incentive = _as_incentive(_require(obj, "incentive", path), f"{path}.incentive")
    utility = (
        _as_utility(obj["utility"], f"{path}.utility")
        if "utility" in obj
        else UtilityModel()
    )
    try:
        return PeerClass(
            size=size,
            demand=demand,
            supply=supply,
            kbar=kbar,
            incentive=incentive,
            contribution=contribution,
            utility=utility,
        )
    except ValueError as error:
        _fail(path, str(error))


def scenario_from_document(document: Any) -> Scenario:
    """Build a Scenario from a parsed JSON document, validating every field."""
    obj = _as_object(document, "document")
    _reject_unknown(
        obj,
        ("goods", "phi0", "seed_distribution", "endogenous_contribution", "classes"),
        "document",
    )
    goods = _as_int(_require(obj, "goods", "document"), "goods", minimum=1)
    phi0 = _as_number(obj["phi0"], "phi0") if "phi0" in obj else 0.0
    seed = (
        _as_distribution(obj["seed_distribution"], "seed_distribution", goods)
        if "seed_distribution" in obj
        else None
    )
    endogenous = (
        _as_bool(obj["endogenous_contribution"], "endogenous_contribution")
        if "endogenous_contribution" in obj
        else False
    )
    classes_value = _require(obj, "classes", "document")
    if not isinstance(classes_value, list) or not classes_value:
        _fail("classes", "expected a non-empty array of peer classes")
    classes = tuple(
        _as_peer_class(entry, f"classes[{i}]", goods)
        for i, entry in enumerate(classes_value)
    )
    try:
        return Scenario(
            classes=classes,
            phi0=phi0,
            seed_distribution=seed,
            endogenous_contribution=endogenous,
        )
    except ValueError as error:
        _fail("document", str(error))


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario document from a JSON file."""
    with open(path) as fh:
        text = fh.read()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ScenarioFormatError(f"document: invalid JSON: {error}") from None
    return scenario_from_document(document)
