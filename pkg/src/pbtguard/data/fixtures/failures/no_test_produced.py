from pbtguard.corpus.tcs import MockRoom


def collect_states(initial_temp):
    """Helper only: the response never defined a test function."""
    room = MockRoom(10, 1, 1, initial_temp)
    return room.execute_scenario()
