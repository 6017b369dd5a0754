from hypothesis import given, strategies as st
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
