from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# The cooler is on whenever the sensed temperature is above 23 degrees.
@given(
    initial_temp=st.integers(min_value=20, max_value=24),
    total_time=st.integers(min_value=1, max_value=50),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_cooler_on_above_23(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        if state.sensed_temp > 23:
            assert state.cooler_value > 0, f"cooler off at {state.sensed_temp}"
