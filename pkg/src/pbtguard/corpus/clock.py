"""Deterministic virtual clock used by the scenario simulators.

Components register periodic callbacks instead of sleeping on the wall
clock.  Time is kept as an exact :class:`fractions.Fraction` so that
callbacks scheduled by different components at "the same" instant really
coincide, and ties are broken by registration order.
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Callable


def as_time(value) -> Fraction:
    """Convert a number of seconds to an exact rational.

    Floats go through their shortest ``repr`` so ``0.1`` becomes ``1/10``
    rather than the binary expansion of the double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"time must be finite, got {value!r}")
        return Fraction(repr(value))
    return Fraction(value)


class VirtualClock:
    """Single-threaded event queue keyed by (due time, registration order)."""

    def __init__(self):
        self.now = Fraction(0)
        self._queue: list[tuple[Fraction, int, Callable[[], None]]] = []
        self._seq = 0

    @property
    def pending(self) -> int:
        return len(self._queue)

    def call_at(self, due, callback: Callable[[], None]) -> None:
        due = as_time(due)
        if due < self.now:
            raise ValueError(f"cannot schedule in the past ({due} < {self.now})")
        heapq.heappush(self._queue, (due, self._seq, callback))
        self._seq += 1

    def every(self, interval, count: int, callback: Callable[[int], None], start=0) -> None:
        """Fire ``callback(i)`` at ``start + i * interval`` for ``i < count``.

        Each occurrence is queued only after the previous one has fired, so
        the registration order of a periodic task is that of its first
        occurrence relative to tasks registered at the same time.
        """
        interval = as_time(interval)
        if interval <= 0:
            raise ValueError("interval must be positive")
        start = as_time(start)
        if count <= 0:
            return
        seq = self._seq
        self._seq += 1

        def fire(i: int) -> None:
            callback(i)
            if i + 1 < count:
                # keep the original tie-break rank for later occurrences
                heapq.heappush(self._queue, (start + (i + 1) * interval, seq, lambda: fire(i + 1)))

        heapq.heappush(self._queue, (start, seq, lambda: fire(0)))

    def advance_to(self, t) -> int:
        """Fire every callback due at or before ``t``; return how many fired."""
        t = as_time(t)
        if t < self.now:
            raise ValueError(f"time cannot go backwards ({t} < {self.now})")
        fired = 0
        while self._queue and self._queue[0][0] <= t:
            due, _, callback = heapq.heappop(self._queue)
            self.now = due
            callback()
            fired += 1
        self.now = t
        return fired

    def run(self) -> int:
        """Drain the queue completely."""
        fired = 0
        while self._queue:
            fired += self.advance_to(self._queue[0][0])
        return fired
