from hypothesis import given, strategies as st

from pbtguard.corpus.pcs import MockSystem


# The horizontal cylinder only moves while the vertical cylinder is raised.
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_horizontal_moves_only_when_raised(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    for state in collected_states:
        if state.a_moving:
            assert state.cylinder_b_location == 0, f"B at {state.cylinder_b_location} while A moves"
