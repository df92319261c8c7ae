"""Unit tests for the core model types and pointwise equations."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iscsim.model import (
    ClubState,
    ConstantIncentive,
    GoodsDistribution,
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
from iscsim.experiments import build_one_type_scenario, build_two_type_scenario


def test_goods_distribution_accepts_simplex_weights():
    d = GoodsDistribution([0.25, 0.75])
    assert d.size == 2
    assert d.weights.dtype == float
    np.testing.assert_allclose(d.weights, [0.25, 0.75])
    assert not d.weights.flags.writeable


def test_goods_distribution_uniform():
    d = GoodsDistribution.uniform(4)
    np.testing.assert_allclose(d.weights, [0.25] * 4)
    with pytest.raises(ValueError):
        GoodsDistribution.uniform(0)


@pytest.mark.parametrize(
    "weights",
    [
        [0.5, 0.4],  # does not sum to one
        [1.5, -0.5],  # negative entry
        [],
        [[0.5, 0.5]],  # not 1-d
        [math.nan, 1.0],
        [math.inf, 0.0],
    ],
)
def test_goods_distribution_rejects_bad_weights(weights):
    with pytest.raises(ValueError):
        GoodsDistribution(weights)


def test_constant_incentive_is_flat():
    inc = ConstantIncentive(0.3)
    assert inc.efficiency(0.0) == 0.3
    assert inc.efficiency(7.0) == 0.3
    assert inc.efficiency_derivative(0.0) == 0.0
    with pytest.raises(ValueError):
        ConstantIncentive(1.2)
    with pytest.raises(ValueError):
        ConstantIncentive(-0.1)


def test_saturating_incentive_curve_and_slope():
    inc = SaturatingIncentive(rho0=0.1, rho_max=0.6, beta=2.0)
    assert inc.efficiency(0.0) == pytest.approx(0.1)
    assert inc.efficiency(0.5) == pytest.approx(0.1 + 0.5 * (1.0 - math.exp(-1.0)))
    assert inc.efficiency(1e9) == pytest.approx(0.6)
    assert inc.efficiency_derivative(0.0) == pytest.approx(1.0)
    assert inc.efficiency_derivative(0.5) == pytest.approx(math.exp(-1.0))


@pytest.mark.parametrize(
    "args",
    [
        dict(rho0=-0.1, rho_max=0.5, beta=1.0),
        dict(rho0=0.5, rho_max=0.4, beta=1.0),  # rho_max below rho0
        dict(rho0=0.1, rho_max=1.5, beta=1.0),
        dict(rho0=0.1, rho_max=0.5, beta=-1.0),
        dict(rho0=0.1, rho_max=0.5, beta=math.inf),
    ],
)
def test_saturating_incentive_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        SaturatingIncentive(**args)


def test_utility_model_gamma():
    assert UtilityModel(a=3.0, c=2.0).propensity_to_contribute() == pytest.approx(1.5)
    with pytest.raises(ValueError):
        UtilityModel(a=0.0)
    with pytest.raises(ValueError):
        UtilityModel(c=-1.0)


def _simple_class(**overrides):
    base = dict(
        size=10,
        demand=GoodsDistribution([1.0]),
        supply=GoodsDistribution([1.0]),
        kbar=1.0,
        incentive=ConstantIncentive(0.5),
    )
    base.update(overrides)
    return PeerClass(**base)


@pytest.mark.parametrize(
    "overrides",
    [
        dict(size=-1),
        dict(size=2.5),
        dict(kbar=-1.0),
        dict(kbar=math.inf),
        dict(contribution=-0.5),
        dict(incentive="high"),
        dict(supply=GoodsDistribution([0.5, 0.5])),  # domain mismatch
    ],
)
def test_peer_class_rejects_bad_fields(overrides):
    with pytest.raises(ValueError):
        _simple_class(**overrides)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(classes=())
    a = _simple_class()
    b = _simple_class(
        demand=GoodsDistribution([0.5, 0.5]), supply=GoodsDistribution([0.5, 0.5])
    )
    with pytest.raises(ValueError):
        Scenario(classes=(a, b))  # classes on different goods domains
    with pytest.raises(ValueError):
        Scenario(classes=(a,), phi0=-1.0)
    with pytest.raises(ValueError):
        Scenario(classes=(a,), seed_distribution=GoodsDistribution([0.5, 0.5]))


def test_scenario_defaults_and_lookup():
    first = _simple_class()
    second = _simple_class()  # equal fields, distinct object
    scenario = Scenario(classes=(first, second))
    assert scenario.goods_count == 1
    assert scenario.population == 20
    np.testing.assert_allclose(scenario.seed_distribution.weights, [1.0])
    assert scenario.index_of(first) == 0
    assert scenario.index_of(second) == 1
    with pytest.raises(ValueError):
        scenario.index_of(_simple_class())


def test_club_state_validation():
    state = ClubState([3.0, 4.5])
    assert state.total == pytest.approx(7.5)
    assert not state.counts.flags.writeable
    for bad in ([-1.0], [math.nan], [], [[1.0]]):
        with pytest.raises(ValueError):
            ClubState(bad)


def test_state_must_match_scenario():
    scenario = build_one_type_scenario(0.0, size=100)
    peer = scenario.classes[0]
    with pytest.raises(ValueError):
        joining_probability(peer, scenario, [1.0, 2.0])  # wrong length
    with pytest.raises(ValueError):
        joining_probability(peer, scenario, [101.0])  # exceeds class size


def test_phi_counts_content():
    scenario = build_two_type_scenario(0.1, size1=160, size2=40)
    assert phi(scenario, [108.0, 22.0]) == pytest.approx(130.0)
    seeded = build_one_type_scenario(0.0, phi0=2.5)
    assert phi(seeded, [0.0]) == pytest.approx(2.5)


def test_content_mix_oracle():
    # 108 type-1 peers supplying {0.9, 0.1} and 22 type-2 supplying {0.1, 0.9}:
    # m = (108*0.9 + 22*0.1, 108*0.1 + 22*0.9) / 130.
    scenario = build_two_type_scenario(0.1, size1=160, size2=40)
    mix = content_mix(scenario, [108.0, 22.0])
    assert mix.weights[0] == pytest.approx(0.7646153846153847, abs=1e-15)
    assert mix.weights.sum() == pytest.approx(1.0)


def test_content_mix_of_empty_unseeded_club_is_inert():
    scenario = build_two_type_scenario(0.1)
    mix = content_mix(scenario, [0.0, 0.0])
    assert mix is scenario.seed_distribution
    for peer in scenario.classes:
        assert joining_probability(peer, scenario, [0.0, 0.0]) == 0.0


def test_joining_probability_oracle():
    scenario = build_one_type_scenario(0.0, size=100)
    p = joining_probability(scenario.classes[0], scenario, [58.3])
    assert p == pytest.approx(0.5829294971952141, abs=1e-15)
    assert p == pytest.approx(1.0 - math.exp(-0.015 * 58.3), abs=1e-15)


def test_mean_joining_probability_weighs_by_population():
    scenario = build_two_type_scenario(0.1, size1=10, size2=30)
    state = [5.0, 6.0]
    p1 = joining_probability(scenario.classes[0], scenario, state)
    p2 = joining_probability(scenario.classes[1], scenario, state)
    expected = (10 * p1 + 30 * p2) / 40
    assert mean_joining_probability(scenario, state) == pytest.approx(expected)


def _response_scenario(gamma: float) -> Scenario:
    # One goods type, rho(0) = 0 with initial slope 1, and content m = 0.5:
    # the response is exactly slope * m * e^0 = 0.5.
    peer = PeerClass(
        size=10,
        demand=GoodsDistribution([1.0]),
        supply=GoodsDistribution([1.0]),
        kbar=1.0,
        incentive=SaturatingIncentive(rho0=0.0, rho_max=0.5, beta=2.0),
        utility=UtilityModel(a=gamma, c=1.0),
    )
    return Scenario(classes=(peer,))


def test_club_response_hand_value():
    scenario = _response_scenario(gamma=1.0)
    assert club_response(scenario.classes[0], scenario, [0.5]) == pytest.approx(
        0.5, abs=1e-15
    )


def test_is_contributor_threshold_is_strict():
    # response * Gamma: 2.0 contributes, exactly 1.0 does not.
    above = _response_scenario(4.0)
    assert is_contributor(above.classes[0], above, [0.5])
    at_threshold = _response_scenario(2.0)
    assert not is_contributor(at_threshold.classes[0], at_threshold, [0.5])
    below = _response_scenario(1.0)
    assert not is_contributor(below.classes[0], below, [0.5])


def test_constant_incentive_never_contributes():
    scenario = build_one_type_scenario(0.0, size=100)
    assert not is_contributor(scenario.classes[0], scenario, [50.0])


# Property tests over a single two-goods class with seed content.


def _property_scenario(kbar: float, phi0: float) -> Scenario:
    peer = PeerClass(
        size=50,
        demand=GoodsDistribution([0.3, 0.7]),
        supply=GoodsDistribution([0.6, 0.4]),
        kbar=kbar,
        incentive=ConstantIncentive(0.2),
    )
    return Scenario(classes=(peer,), phi0=phi0)


@settings(max_examples=50, deadline=None)
@given(
    n=st.floats(0.0, 50.0),
    kbar=st.floats(0.01, 5.0),
    phi0=st.floats(0.0, 10.0),
)
def test_probability_stays_in_unit_interval(n, kbar, phi0):
    scenario = _property_scenario(kbar, phi0)
    p = joining_probability(scenario.classes[0], scenario, [n])
    assert 0.0 <= p <= 1.0


@settings(max_examples=50, deadline=None)
@given(
    n=st.floats(0.0, 49.0),
    bump=st.floats(0.0, 1.0),
    phi0=st.floats(0.0, 10.0),
)
def test_probability_grows_with_membership(n, bump, phi0):
    scenario = _property_scenario(1.0, phi0)
    low = joining_probability(scenario.classes[0], scenario, [n])
    high = joining_probability(scenario.classes[0], scenario, [n + bump])
    assert high >= low


@settings(max_examples=50, deadline=None)
@given(n=st.floats(0.0, 50.0), kbar=st.floats(0.01, 5.0), phi0=st.floats(0.0, 10.0))
def test_content_mix_is_a_distribution(n, kbar, phi0):
    scenario = _property_scenario(kbar, phi0)
    mix = content_mix(scenario, [n])
    assert np.all(mix.weights >= 0.0)
    assert mix.weights.sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(n=st.floats(0.0, 50.0), kbar=st.floats(0.01, 5.0), phi0=st.floats(0.0, 10.0))
def test_phi_is_linear_in_counts(n, kbar, phi0):
    scenario = _property_scenario(kbar, phi0)
    assert phi(scenario, [n]) == pytest.approx(n * kbar + phi0, rel=1e-12, abs=1e-12)
