from hypothesis import given, strategies as st
from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.line_following_robot import LineFollowingRobot


# When both sensors are off both motors drive forward.
@given(
    left_sensor_value=st.integers(min_value=0, max_value=1),
    right_sensor_value=st.integers(min_value=0, max_value=1),
    speed=st.floats(min_value=0.1, max_value=1.0),
)
def test_both_off_drives_forward(left_sensor_value, right_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3), Motor(5, 6), 17, 27, speed=speed) as robot:
        robot.left_sensor.pin.drive_up(left_sensor_value)
        robot.right_sensor.pin.drive_up(right_sensor_value)
        if left_sensor_value == 0 and right_sensor_value == 0:
            assert robot.left_motor.value == speed
            assert robot.right_motor.value == speed
