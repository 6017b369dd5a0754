from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# The heater is never switched on.
@given(initial_temp=st.integers(min_value=15, max_value=19))
def test_heater_never_on(initial_temp):
    room = MockRoom(10, 1, 1, initial_temp)
    for state in room.execute_scenario():
        assert state.heater_value == 0, f"heater on at {state.sensed_temp}"
