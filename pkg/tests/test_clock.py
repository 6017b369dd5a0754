from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pbtguard.corpus.clock import VirtualClock, as_time


def test_as_time_uses_shortest_float_repr():
    assert as_time(0.1) == Fraction(1, 10)
    assert as_time(3) == Fraction(3)


def test_as_time_rejects_non_finite():
    with pytest.raises(ValueError):
        as_time(float("inf"))


def test_ties_fire_in_registration_order():
    clock = VirtualClock()
    fired = []
    clock.every(1, 3, lambda i: fired.append(("a", i)))
    clock.every(1, 3, lambda i: fired.append(("b", i)))
    clock.run()
    assert fired == [("a", 0), ("b", 0), ("a", 1), ("b", 1), ("a", 2), ("b", 2)]


def test_fractional_intervals_coincide_exactly():
    clock = VirtualClock()
    times = []
    clock.every(0.1, 11, lambda i: times.append(clock.now))
    clock.run()
    assert times[-1] == 1


def test_cannot_schedule_in_the_past():
    clock = VirtualClock()
    clock.advance_to(5)
    with pytest.raises(ValueError):
        clock.call_at(4, lambda: None)
    with pytest.raises(ValueError):
        clock.advance_to(3)


def test_non_positive_interval_rejected():
    with pytest.raises(ValueError):
        VirtualClock().every(0, 3, lambda i: None)


@given(interval=st.integers(min_value=1, max_value=7), count=st.integers(min_value=0, max_value=40))
def test_every_fires_count_times(interval, count):
    clock = VirtualClock()
    seen = []
    clock.every(Fraction(interval, 3), count, seen.append)
    assert clock.run() == count
    assert seen == list(range(count))
