from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# Degenerate control: the generator only ever produces one initial temperature.
@given(
    initial_temp=st.just(22),
    total_time=st.integers(min_value=1, max_value=50),
)
def test_constant_initial_temperature(initial_temp, total_time):
    room = MockRoom(total_time, 1, 1, initial_temp)
    for state in room.execute_scenario():
        assert 20 <= state.temp <= 24
