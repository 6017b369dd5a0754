from pbtguard.corpus.apps.laser_tripwire import LaserTripwire
from pbtguard.corpus.gpio import Device, MockFactory


def test_alarm_when_beam_broken():
    Device.pin_factory = MockFactory()
    printed = []
    with LaserTripwire(4, output=printed.append) as tripwire:
        tripwire.ldr.pin.drive_low()
        assert tripwire.check() is True
    assert printed == ["INTRUDER"]
