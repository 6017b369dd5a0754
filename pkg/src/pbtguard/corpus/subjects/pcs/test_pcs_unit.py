from pbtguard.corpus.pcs import MockSystem


def test_pick_and_place_first_moves():
    system = MockSystem(total_time=8, cylinder_interval=1, controller_interval=1, mock_interval=1)
    collected_states = system.execute_scenario()

    assert len(collected_states) == 8
    assert [s.cylinder_b_location for s in collected_states[:4]] == [1.0, 2.0, 1.0, 0.0]
    assert collected_states[4].cylinder_a_loc == 1.0
    assert collected_states[5].cylinder_a_loc == 2.0
