from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# Neither heater nor cooler is active while the sensed temperature is within 21-23 degrees.
@given(
    initial_temp=st.integers(min_value=20, max_value=24),
    total_time=st.integers(min_value=1, max_value=50),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_idle_in_target_range(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        if 21 <= state.sensed_temp <= 23:
            assert state.heater_value == 0 and state.cooler_value == 0
