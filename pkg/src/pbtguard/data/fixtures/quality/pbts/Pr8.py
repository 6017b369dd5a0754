from hypothesis import given, strategies as st

from pbtguard.corpus.pcs import MockSystem


# A cylinder never travels faster than one position unit per second.
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_cylinder_speed_limit(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    limit = cylinder_interval * 1.0 + 1e-9
    for before, after in zip(collected_states, collected_states[1:]):
        assert abs(after.cylinder_a_loc - before.cylinder_a_loc) <= limit
        assert abs(after.cylinder_b_location - before.cylinder_b_location) <= limit
