"""Run containers and component-wise wall-time accounting.

All durations come from a monotonic clock.  The ``total`` of a
:class:`TimingBreakdown` is the full span of the run as the end user sees
it, so it is always at least the sum of the named phases.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TimingBreakdown:
    setup: float = 0.0
    compute: float = 0.0
    collect: float = 0.0
    tuning: float = 0.0
    total: float = 0.0

    def __post_init__(self):
        for name in ("setup", "compute", "collect", "tuning", "total"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} time must be non-negative")
        if self.total + 1e-12 < self.setup + self.compute + self.collect:
            raise ValueError("total must cover setup + compute + collect")

    def to_dict(self) -> dict:
        return {
            "setup": self.setup,
            "compute": self.compute,
            "collect": self.collect,
            "tuning": self.tuning,
            "total": self.total,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimingBreakdown":
        return cls(**{k: float(data[k]) for k in ("setup", "compute", "collect", "tuning", "total")})


class PhaseTimer:
    """Accumulates named phases; ``finish`` stamps the enclosing span."""

    def __init__(self):
        self._t0 = time.perf_counter()
        self._phases = {"setup": 0.0, "compute": 0.0, "collect": 0.0, "tuning": 0.0}

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self._phases[name] += time.perf_counter() - start

    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    def finish(self) -> TimingBreakdown:
        return TimingBreakdown(total=self.elapsed(), **self._phases)


@dataclass
class SolverRun:
    """One stochastic solve: best result, per-replica energies, timed trace."""

    solver: str
    best_energy: float
    best_state: np.ndarray
    energies: np.ndarray
    trace: list = field(default_factory=list)  # (seconds since run start, energy)
    timing: TimingBreakdown = field(default_factory=TimingBreakdown)
    hyperparameters: dict = field(default_factory=dict)
    states: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "best_energy": self.best_energy,
            "best_state": [int(v) for v in np.asarray(self.best_state)],
            "energies": [float(e) for e in np.asarray(self.energies)],
            "trace": [[float(t), float(e)] for t, e in self.trace],
            "timing": self.timing.to_dict(),
            "hyperparameters": self.hyperparameters,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolverRun":
        return cls(
            solver=data["solver"],
            best_energy=float(data["best_energy"]),
            best_state=np.asarray(data["best_state"], dtype=np.float64),
            energies=np.asarray(data["energies"], dtype=np.float64),
            trace=[(float(t), float(e)) for t, e in data.get("trace", [])],
            timing=TimingBreakdown.from_dict(data["timing"]),
            hyperparameters=data.get("hyperparameters", {}),
            extra=data.get("extra", {}),
        )
