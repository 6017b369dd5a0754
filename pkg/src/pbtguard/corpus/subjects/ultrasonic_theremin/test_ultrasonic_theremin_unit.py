from pbtguard.corpus.apps.ultrasonic_theremin import UltrasonicTheremin
from pbtguard.corpus.gpio import Device, MockFactory


def test_half_range_gives_half_volume():
    Device.pin_factory = MockFactory()
    with UltrasonicTheremin() as theremin:
        theremin.sensor.echo.drive_analog(1.0)
        assert theremin.volume == 0.5
