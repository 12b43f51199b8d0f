"""Per-invocation counters reported by the CLI (--json ``stats`` field)."""

from __future__ import annotations

import contextvars
import time
from contextlib import contextmanager
from dataclasses import dataclass

_current: contextvars.ContextVar = contextvars.ContextVar("regsep_stats", default=None)


@dataclass
class Stats:
    steps: int = 0
    basis_size: int = 0
    wallclock_ms: float = 0.0

    def as_dict(self) -> dict:
        return {
            "steps": self.steps,
            "basis_size": self.basis_size,
            "wallclock_ms": round(self.wallclock_ms, 3),
        }


def record(steps: int = 0, basis_size: int = 0) -> None:
    stats = _current.get()
    if stats is not None:
        stats.steps += steps
        stats.basis_size = max(stats.basis_size, basis_size)


@contextmanager
def collecting():
    stats = Stats()
    token = _current.set(stats)
    start = time.perf_counter()
    try:
        yield stats
    finally:
        stats.wallclock_ms = (time.perf_counter() - start) * 1000.0
        _current.reset(token)
