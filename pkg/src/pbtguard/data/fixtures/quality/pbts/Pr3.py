from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# The room temperature never drops below 20 or rises above 24 degrees.
@given(
    initial_temp=st.integers(min_value=20, max_value=24),
    total_time=st.integers(min_value=1, max_value=50),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_temperature_stays_in_range(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        assert 20 <= state.temp <= 24, f"temperature out of range: {state.temp}"
