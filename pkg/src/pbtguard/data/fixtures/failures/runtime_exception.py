from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# The average temperature of a scenario is within range.
@given(initial_temp=st.integers(min_value=20, max_value=24))
def test_average_temperature(initial_temp):
    room = MockRoom(0, 1, 1, initial_temp)
    states = [s for s in room.execute_scenario() if s.tick > 10**9]
    average = sum(s.temp for s in states) / len(states)
    assert 20 <= average <= 24
