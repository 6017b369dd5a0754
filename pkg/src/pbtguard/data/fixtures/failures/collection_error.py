from hypothesis import given, strategies as st

from pbtguard.corpus.thermostat import MockRoom


# The room temperature stays between 20 and 24 degrees.
@given(initial_temp=st.integers(min_value=20, max_value=24))
def test_temperature_stays_in_range(initial_temp):
    room = MockRoom(10, 1, 1, initial_temp)
    for state in room.execute_scenario():
        assert 20 <= state.temp <= 24
