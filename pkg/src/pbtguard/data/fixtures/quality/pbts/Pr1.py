from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# The heater is on whenever the sensed temperature is below 21 degrees.
@given(
    initial_temp=st.integers(min_value=20, max_value=24),
    total_time=st.integers(min_value=1, max_value=50),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_heater_on_below_21(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        if state.sensed_temp < 21:
            assert state.heater_value > 0, f"heater off at {state.sensed_temp}"
