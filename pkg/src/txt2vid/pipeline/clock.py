"""Clock abstraction so every latency-sensitive path can run deterministically.

The discrete-event runner never sleeps: it advances a SimulatedClock to the
next interesting instant. WallClock exists for the live gateway path.
"""

from __future__ import annotations

import time


class SimulatedClock:
    def __init__(self, start_ms: int = 0) -> None:
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def advance_to(self, ts_ms: int) -> None:
        if ts_ms < self._now:
            raise ValueError(f"time cannot run backwards ({ts_ms} < {self._now})")
        self._now = ts_ms

    def advance(self, delta_ms: int) -> None:
        self.advance_to(self._now + delta_ms)


class WallClock:
    def __init__(self) -> None:
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)
