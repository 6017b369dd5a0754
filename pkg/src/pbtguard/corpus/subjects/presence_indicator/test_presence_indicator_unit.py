from pbtguard.corpus.apps.presence_indicator import PresenceIndicator
from pbtguard.corpus.gpio import Device, MockFactory


def test_twenty_five_people_light_two_leds():
    Device.pin_factory = MockFactory()
    with PresenceIndicator() as indicator:
        indicator.update(25)
        assert indicator.lit_leds == 2
