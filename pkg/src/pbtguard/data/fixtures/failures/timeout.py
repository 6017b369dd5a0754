from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


# The controller eventually settles the room at 22 degrees.
@given(initial_temp=st.integers(min_value=20, max_value=24))
def test_room_settles(initial_temp):
    room = MockRoom(10, 1, 1, initial_temp)
    states = room.execute_scenario()
    while True:
        if states and states[-1].temp == 1000:
            break
