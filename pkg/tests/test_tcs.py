import math
import random

import pytest
from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import (Actuation, Decision, MockRoom, TCSConfig, tcs_decide, tcs_execute_scenario)
from pbtguard.errors import ConfigurationError, DomainError


@pytest.mark.parametrize("temp, decision", [
    (20.9, Decision.HEAT), (21, Decision.OFF), (22, Decision.OFF), (23, Decision.OFF), (23.1, Decision.COOL),
])
def test_decision_boundaries(temp, decision):
    assert tcs_decide(temp) is decision


def test_decision_rejects_nan():
    with pytest.raises(DomainError):
        tcs_decide(math.nan)


def test_zero_length_scenario_is_empty():
    assert MockRoom(0, 1, 1, 22).execute_scenario() == []


@pytest.mark.parametrize("kwargs", [
    {"total_time": -1}, {"sensor_interval": 0}, {"control_interval": -2}, {"total_time": 0.5, "sensor_interval": 1},
    {"total_time": math.inf},
])
def test_invalid_config(kwargs):
    with pytest.raises(ConfigurationError):
        TCSConfig(**kwargs).validate()


def test_one_state_per_plant_tick():
    states = MockRoom(12, 1, 1, 22, seed=3).execute_scenario()
    assert [s.tick for s in states] == list(range(12))


def test_same_seed_same_trace():
    config = TCSConfig(30, 1, 1, 22, seed=9)
    assert tcs_execute_scenario(config) == tcs_execute_scenario(config)


def test_plant_update_follows_recorded_actuation():
    states = MockRoom(30, 1, 1, 20, seed=4).execute_scenario()
    for before, after in zip(states, states[1:]):
        expected = before.temp + before.outside_air_temp + before.heater_value - before.cooler_value
        assert after.temp == pytest.approx(expected)


def test_channel_sees_proposed_command_and_can_replace_it():
    seen = []

    def channel(tick, command, predict):
        seen.append((tick, command))
        return Actuation(0.0, 0.0)

    states = MockRoom(5, 1, 1, 18).execute_scenario(channel=channel)
    assert seen[0][1].heater_value == 1
    assert all(s.heater_value == 0 and s.cooler_value == 0 for s in states)


@given(initial_temp=st.integers(min_value=20, max_value=24), total_time=st.integers(min_value=1, max_value=50),
       seed=st.integers(min_value=0, max_value=10_000))
def test_actuation_matches_decision_of_sensed_temp(initial_temp, total_time, seed):
    for state in MockRoom(total_time, 1, 1, initial_temp, seed).execute_scenario():
        decision = tcs_decide(state.sensed_temp)
        assert (state.heater_value > 0) == (decision is Decision.HEAT)
        assert (state.cooler_value > 0) == (decision is Decision.COOL)
        assert not (state.heater_value > 0 and state.cooler_value > 0)
        assert 20 <= state.temp <= 24


def test_random_initial_temperature_is_seeded():
    a = MockRoom(5, 1, 1, None, seed=11).execute_scenario()[0].temp
    b = MockRoom(5, 1, 1, None, seed=11).execute_scenario()[0].temp
    assert a == b
    random.seed(0)  # global RNG state must not matter
    assert MockRoom(5, 1, 1, None, seed=11).execute_scenario()[0].temp == a
