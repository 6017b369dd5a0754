"""Write the quality-table PBTs and their executability patches.

Each entry is (property id, subject, source, fixed source or None).  The
patch shipped for a row is the unified diff from source to fixed source.
Run from the repository root; then run tools/rebuild_fixtures.py.
"""

import difflib
from pathlib import Path

OUT = Path("src/pbtguard/data/fixtures/quality")

TCS_HEAD = '''from hypothesis import given, strategies as st

from pbtguard.corpus.tcs import MockRoom


'''
TCS_GIVEN = '''@given(
    initial_temp=st.integers(min_value=20, max_value=24),
    total_time=st.integers(min_value=1, max_value=50),
    seed=st.integers(min_value=0, max_value=10_000),
)
'''

PCS_HEAD = '''from hypothesis import given, strategies as st

from pbtguard.corpus.pcs import MockSystem


'''
PCS_GIVEN = '''@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
'''
PCS_SIG = "(total_time, cylinder_interval, controller_interval, mock_interval)"
PCS_BODY = '''    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()
'''

ENTRIES = []


def add(pid, subject, source, fixed=None):
    ENTRIES.append((pid, subject, source, fixed))


add("Pr1", "tcs", TCS_HEAD + "# The heater is on whenever the sensed temperature is below 21 degrees.\n" + TCS_GIVEN + '''def test_heater_on_below_21(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        if state.sensed_temp < 21:
            assert state.heater_value > 0, f"heater off at {state.sensed_temp}"
''')
add("Pr2", "tcs", TCS_HEAD + "# The cooler is on whenever the sensed temperature is above 23 degrees.\n" + TCS_GIVEN + '''def test_cooler_on_above_23(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        if state.sensed_temp > 23:
            assert state.cooler_value > 0, f"cooler off at {state.sensed_temp}"
''')
add("Pr3", "tcs", TCS_HEAD + "# The room temperature never drops below 20 or rises above 24 degrees.\n" + TCS_GIVEN + '''def test_temperature_stays_in_range(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        assert 20 <= state.temp <= 24, f"temperature out of range: {state.temp}"
''')
add("Pr4", "tcs", TCS_HEAD + "# Neither heater nor cooler is active while the sensed temperature is within 21-23 degrees.\n" + TCS_GIVEN + '''def test_idle_in_target_range(initial_temp, total_time, seed):
    room = MockRoom(total_time, 1, 1, initial_temp, seed)
    collected_states = room.execute_scenario()
    for state in collected_states:
        if 21 <= state.sensed_temp <= 23:
            assert state.heater_value == 0 and state.cooler_value == 0
''')
add("Pr5", "pcs", PCS_HEAD + "# The horizontal cylinder only moves while the vertical cylinder is raised.\n" + PCS_GIVEN + f'''def test_horizontal_moves_only_when_raised{PCS_SIG}:
{PCS_BODY}
    for state in collected_states:
        if state.a_moving:
            assert state.cylinder_b_location == 0, f"B at {{state.cylinder_b_location}} while A moves"
''')
add("Pr6", "pcs", PCS_HEAD + "# The two cylinders never move at the same time.\n" + PCS_GIVEN + f'''def test_cylinders_move_one_at_a_time{PCS_SIG}:
{PCS_BODY}
    for state in collected_states:
        assert not (state.a_moving and state.b_moving), f"both cylinders moving at tick {{state.tick}}"
''')
add("Pr7", "pcs", PCS_HEAD + "# Test that the cylinder locations remain within the bounds (0 and 2) at all times.\n" + PCS_GIVEN + f'''def test_cylinder_location_in_bounds{PCS_SIG}:
{PCS_BODY}
    for state in collected_states:
        assert 0 <= state.cylinder_a_loc <= 2, f"Cylinder A out of bounds: {{state.cylinder_a_loc}}"
        assert 0 <= state.cylinder_b_location <= 2, f"Cylinder B out of bounds: {{state.cylinder_b_location}}"
''')
add("Pr8", "pcs", PCS_HEAD + "# A cylinder never travels faster than one position unit per second.\n" + PCS_GIVEN + f'''def test_cylinder_speed_limit{PCS_SIG}:
{PCS_BODY}
    limit = cylinder_interval * 1.0 + 1e-9
    for before, after in zip(collected_states, collected_states[1:]):
        assert abs(after.cylinder_a_loc - before.cylinder_a_loc) <= limit
        assert abs(after.cylinder_b_location - before.cylinder_b_location) <= limit
''')
add("Pr9", "laser_tripwire", '''from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.laser_tripwire import LaserTripwire


# INTRUDER is printed if and only if the beam does not reach the sensor.
@given(light_present=st.just(False))
def test_intruder_printed_iff_dark(light_present):
    Device.pin_factory = MockFactory()
    printed = []
    with LaserTripwire(4, output=printed.append) as tripwire:
        if light_present:
            tripwire.ldr.pin.drive_high()
        else:
            tripwire.ldr.pin.drive_low()
        tripwire.check()
    assert (printed == ["INTRUDER"]) == (not light_present)
''')

LFR_HEAD = '''from hypothesis import given, strategies as st
from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.line_following_robot import LineFollowingRobot


'''
LFR_GIVEN = '''@given(
    left_sensor_value=st.integers(min_value=0, max_value=1),
    right_sensor_value=st.integers(min_value=0, max_value=1),
    speed=st.floats(min_value=0.1, max_value=1.0),
)
'''
add("Pr10", "line_following_robot", LFR_HEAD + "# When the left sensor is on the left motor reverses and the right motor drives forward.\n" + LFR_GIVEN + '''def test_left_sensor_turns_left(left_sensor_value, right_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3), Motor(5, 6), 17, 27, speed=speed) as robot:
        robot.left_sensor.pin.drive_up(left_sensor_value)
        robot.right_sensor.pin.drive_up(right_sensor_value)
        if left_sensor_value == 1 and right_sensor_value == 0:
            assert robot.left_motor.value == -speed
            assert robot.right_motor.value == speed
''')
add("Pr11", "line_following_robot", LFR_HEAD + "# When the right sensor is on the right motor reverses and the left motor drives forward.\n" + LFR_GIVEN + '''def test_right_sensor_turns_right(left_sensor_value, right_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3), Motor(5, 6), 17, 27, speed=speed) as robot:
        robot.left_sensor.pin.drive_up(left_sensor_value)
        robot.right_sensor.pin.drive_up(right_sensor_value)
        if left_sensor_value == 0 and right_sensor_value == 1:
            assert robot.right_motor.value == -speed
            assert robot.left_motor.value == speed
''')
add("Pr12", "line_following_robot", LFR_HEAD + "# When both sensors are off both motors drive forward.\n" + LFR_GIVEN + '''def test_both_off_drives_forward(left_sensor_value, right_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3), Motor(5, 6), 17, 27, speed=speed) as robot:
        robot.left_sensor.pin.drive_up(left_sensor_value)
        robot.right_sensor.pin.drive_up(right_sensor_value)
        if left_sensor_value == 0 and right_sensor_value == 0:
            assert robot.left_motor.value == speed
            assert robot.right_motor.value == speed
''')

THEREMIN_HEAD = '''import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.ultrasonic_theremin import UltrasonicTheremin


@pytest.fixture
def theremin():
    Device.pin_factory = MockFactory()
    app = UltrasonicTheremin()
    yield app
    app.close()


'''
pr14 = THEREMIN_HEAD + '''# The volume never gets too high or too low.
@given(distance=st.floats(min_value=0.0, max_value=3.0))
def test_volume_within_limits(theremin, distance):
    theremin.sensor.echo.drive_analog(distance)
    assert 0 <= theremin.volume <= 1
'''
add("Pr14", "ultrasonic_theremin", pr14, pr14.replace(
    "def test_volume_within_limits(theremin, distance):\n",
    "def test_volume_within_limits(distance):\n    theremin = UltrasonicTheremin()\n"))
pr15 = THEREMIN_HEAD + '''# The volume grows as the hand gets closer to the sensor.
@given(near=st.floats(min_value=0.0, max_value=3.0), far=st.floats(min_value=0.0, max_value=3.0))
def test_closer_is_louder(theremin, near, far):
    theremin.sensor.echo.drive_analog(near)
    near_volume = theremin.volume
    theremin.sensor.echo.drive_analog(far)
    if near < far:
        assert near_volume >= theremin.volume
'''
add("Pr15", "ultrasonic_theremin", pr15, pr15.replace(
    "def test_closer_is_louder(theremin, near, far):\n",
    "def test_closer_is_louder(near, far):\n    theremin = UltrasonicTheremin()\n"))

PRESENCE_HEAD = '''import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.presence_indicator import PresenceIndicator


@pytest.fixture
def indicator():
    Device.pin_factory = MockFactory()
    app = PresenceIndicator()
    yield app
    app.close()


'''
pr20 = PRESENCE_HEAD + '''# The LEDs show the number of people present divided by 10.
@given(count=st.integers(min_value=0, max_value=39))
def test_leds_show_count_over_ten(indicator, count):
    indicator.update(count)
    assert indicator.lit_leds == count // 10
'''
add("Pr20", "presence_indicator", pr20, pr20.replace(
    "def test_leds_show_count_over_ten(indicator, count):\n",
    "def test_leds_show_count_over_ten(count):\n    indicator = PresenceIndicator()\n"))
pr21 = PRESENCE_HEAD + '''# With ten or more people present at least one LED is lit.
@given(count=st.integers(min_value=10, max_value=39))
def test_one_shown_from_ten_people(indicator, count):
    indicator.update(count)
    assert indicator.lit_leds >= 1
'''
add("Pr21", "presence_indicator", pr21, pr21.replace(
    "def test_one_shown_from_ten_people(indicator, count):\n",
    "def test_one_shown_from_ten_people(count):\n    indicator = PresenceIndicator()\n"))

INPUT_HEAD = '''import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice, PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


'''
pr23 = INPUT_HEAD + '''# The pull_up argument decides whether the pin is pulled up or down.
@given(pull_up=st.booleans())
def test_pull_up_sets_pin_pull(factory, pull_up):
    with InputDevice(4, pull_up=pull_up) as device:
        assert device.pin.pull == ("up" if pull_up else "down")
'''
add("Pr23", "input_device", pr23, pr23.replace("(factory, pull_up):", "(pull_up):"))
pr24 = INPUT_HEAD + '''# A floating pin (pull_up=None) needs an explicit active_state.
@given(pin=st.integers(min_value=2, max_value=27))
def test_floating_pin_requires_active_state(factory, pin):
    with pytest.raises(PinInvalidState):
        InputDevice(pin, pull_up=None)
'''
add("Pr24", "input_device", pr24, pr24.replace("(factory, pin):", "(pin):"))
pr25 = INPUT_HEAD + '''# With a pull resistor the activation is the reverse of the pull direction.
@given(pull_up=st.booleans())
def test_pull_up_reverses_activation(factory, pull_up):
    led = factory.pin(4)
    led.function = "output"
    device = InputDevice(4, pull_up=pull_up)
    led.drive_up(1)
    assert device.is_active == (not pull_up)
    led.drive_up(0)
    assert device.is_active == pull_up
'''
add("Pr25", "input_device", pr25, pr25.replace('''def test_pull_up_reverses_activation(factory, pull_up):
    led = factory.pin(4)
    led.function = "output"
    device = InputDevice(4, pull_up=pull_up)
    led.drive_up(1)
    assert device.is_active == (not pull_up)
    led.drive_up(0)
    assert device.is_active == pull_up
''', '''def test_pull_up_reverses_activation(pull_up):
    with InputDevice(4, pull_up=pull_up) as device:
        device.pin.drive_high()
        assert device.is_active == (not pull_up)
        device.pin.drive_low()
        assert device.is_active == pull_up
'''))
pr26 = INPUT_HEAD + '''# Closing the input device releases its pin.
@given(pull_up=st.booleans())
def test_close_releases_pin(factory, pull_up):
    device = InputDevice(4, pull_up=pull_up)
    pin = device.pin
    device.close()
    assert device.pin is None and not pin.in_use
'''
add("Pr26", "input_device", pr26, pr26.replace("(factory, pull_up):", "(pull_up):"))


def main():
    (OUT / "pbts").mkdir(parents=True, exist_ok=True)
    (OUT / "patches").mkdir(parents=True, exist_ok=True)
    for pid, subject, source, fixed in ENTRIES:
        (OUT / "pbts" / f"{pid}.py").write_text(source, encoding="utf-8")
        patch = OUT / "patches" / f"{pid}.diff"
        if fixed is not None:
            diff = difflib.unified_diff(source.splitlines(True), fixed.splitlines(True),
                                        f"a/{pid}.py", f"b/{pid}.py")
            patch.write_text("".join(diff), encoding="utf-8")
        elif patch.exists():
            patch.unlink()


if __name__ == "__main__":
    main()
