import pytest

from pbtguard.corpus.faults import FaultDescriptor, inject_fault, make_tamper, parse_faults
from pbtguard.corpus.tcs import Actuation, TCSConfig
from pbtguard.errors import ConfigurationError, UnknownFieldError


def test_parse_forms():
    assert parse_faults("cooler_value=0, cylinder_a_loc=3@5, x=true, y=none") == (
        FaultDescriptor("cooler_value", 0), FaultDescriptor("cylinder_a_loc", 3, 5),
        FaultDescriptor("x", True), FaultDescriptor("y", None))
    assert parse_faults("") == () and parse_faults(None) == ()


def test_named_fault_expands():
    assert parse_faults("disable_cooler") == (FaultDescriptor("cooler_value", 0),)


@pytest.mark.parametrize("text", ["cooler_value", "=1", "a=1@x", "a=abc"])
def test_parse_errors(text):
    with pytest.raises(ConfigurationError):
        parse_faults(text)


def test_round_trip_text():
    for fault in parse_faults("cylinder_a_loc=3@5,cooler_value=0.5"):
        assert parse_faults(str(fault)) == (fault,)


def test_unknown_field_rejected():
    with pytest.raises(UnknownFieldError):
        make_tamper("tcs", parse_faults("nozzle=1"))


def test_tamper_only_on_its_tick():
    tamper = make_tamper("tcs", parse_faults("heater_value=1@2"))
    command = Actuation(0.0, 0.0)
    assert tamper(1, command) == command
    assert tamper(2, command).heater_value == 1


def test_state_fault_forces_recorded_value():
    trace = inject_fault("pcs", "cylinder_a_loc=3@5")(None)
    assert trace[5].cylinder_a_loc == 3
    assert trace[4].cylinder_a_loc != 3


def test_disabled_cooler_lets_room_overheat():
    run = inject_fault("tcs", "disable_cooler")
    trace = run(TCSConfig(20, 1, 1, 24, seed=1))
    assert all(s.cooler_value == 0 for s in trace)
