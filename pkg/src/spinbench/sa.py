"""Simulated annealing over a geometric inverse-temperature schedule.

Two variants share the sweep skeleton:

* quadratic: a full matrix of flip costs delta_rv is initialized once as
  -2 s (s J + h) and updated incrementally after every accepted flip
  (delta_rw -= 4 J_vw s_rv s_rw with the post-flip s_rv), so a sweep reads
  costs without touching the couplings;
* cubic: incremental updates are not worthwhile for three-body slices, so
  the cost vector for the active variable is recomputed from the current
  states right before the acceptance test, keeping costs in sync with the
  stored states.

A flip with delta < 0 is always taken, otherwise it is taken with
probability exp(-delta * beta).  Every acceptance decision consumes exactly
one uniform from its trajectory's stream (the value is simply unused when
delta < 0), so the draw for decision (step, pass, v) sits at a fixed stream
position and trajectories can be replayed or run in parallel without
changing results.  Trajectory r derives its stream from the r-th spawn of
the master seed: first n integer draws for the start state, then
passes * n uniforms per temperature step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HuboInstance, IsingInstance, batch_energies
from .runs import PhaseTimer, SolverRun


@dataclass(frozen=True)
class SaConfig:
    n_trajectories: int = 256
    n_steps: int = 200
    n_passes: int = 1
    t0: float = 10.0
    t1: float = 0.05
    seed: int = 0
    trace_every: int | None = None

    def __post_init__(self):
        if not (self.t0 >= self.t1 > 0):
            raise ValueError("temperatures must satisfy t0 >= t1 > 0")
        if min(self.n_trajectories, self.n_steps, self.n_passes) < 1:
            raise ValueError("counts must be >= 1")

    def describe(self) -> dict:
        return {
            "n_trajectories": self.n_trajectories,
            "n_steps": self.n_steps,
            "n_passes": self.n_passes,
            "t0": self.t0,
            "t1": self.t1,
            "seed": self.seed,
            "trace_every": self.trace_every,
        }


def beta_schedule(t0: float, t1: float, n_steps: int) -> np.ndarray:
    """Geometric sequence of inverse temperatures from 1/t0 to 1/t1,
    inclusive; a single step uses 1/t0."""
    if not (t0 >= t1 > 0):
        raise ValueError("temperatures must satisfy t0 >= t1 > 0")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps == 1:
        return np.array([1.0 / t0])
    return np.geomspace(1.0 / t0, 1.0 / t1, n_steps)


def _spawn_streams(seed: int, count: int):
    return [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(count)]


def _random_states(streams, n: int) -> np.ndarray:
    rows = [st.integers(0, 2, size=n) * 2.0 - 1.0 for st in streams]
    return np.asarray(rows, dtype=np.float64)


def _acceptance(delta_v: np.ndarray, beta: float, uniforms: np.ndarray) -> np.ndarray:
    # clip keeps exp() in range; clipped rows are accepted by the first clause
    return (delta_v < 0) | (uniforms < np.exp(-np.clip(delta_v, 0.0, None) * beta))


class QuboAnnealer:
    """Trajectory batch for a quadratic instance with an incremental
    flip-cost matrix; exposed for replay-style verification."""

    def __init__(self, inst: IsingInstance, n_trajectories: int, seed: int):
        self.inst = inst
        self.n = inst.n
        self.m = n_trajectories
        self.J, self.h = inst.dense()
        self.streams = _spawn_streams(seed, n_trajectories)
        self.s = _random_states(self.streams, self.n)
        self.delta = self.delta_from_scratch()

    def delta_from_scratch(self) -> np.ndarray:
        return -2.0 * self.s * (self.s @ self.J + self.h)

    def uniform_block(self, n_passes: int) -> np.ndarray:
        """Per-trajectory uniforms for one temperature step, one column per
        (pass, variable) decision."""
        return np.asarray([st.random(n_passes * self.n) for st in self.streams])

    def update_variable(self, v: int, beta: float, uniforms: np.ndarray) -> np.ndarray:
        """Metropolis test for variable v across all trajectories; applies
        accepted flips and their incremental cost updates."""
        accept = _acceptance(self.delta[:, v], beta, uniforms)
        if np.any(accept):
            rows = np.where(accept)[0]
            self.s[rows, v] *= -1.0
            self.delta[rows, v] *= -1.0
            # J_vv = 0 leaves the freshly negated v entry untouched
            self.delta[rows, :] -= (
                4.0 * self.J[v, :] * self.s[rows, v : v + 1] * self.s[rows, :]
            )
        return accept

    def temperature_step(self, beta: float, n_passes: int) -> None:
        block = self.uniform_block(n_passes)
        for p in range(n_passes):
            for v in range(self.n):
                self.update_variable(v, beta, block[:, p * self.n + v])

    def energies(self) -> np.ndarray:
        return batch_energies(self.inst, self.s)


class HuboAnnealer:
    """Trajectory batch for a cubic instance; flip costs for the active
    variable are recomputed from per-variable coupling slices."""

    def __init__(self, inst: HuboInstance, n_trajectories: int, seed: int):
        self.inst = inst
        self.n = inst.n
        self.m = n_trajectories
        self.streams = _spawn_streams(seed, n_trajectories)
        self.s = _random_states(self.streams, self.n)
        pair_slices = [[] for _ in range(self.n)]
        for (i, j), val in inst.pair_terms.items():
            pair_slices[i].append((j, val))
            pair_slices[j].append((i, val))
        triple_slices = [[] for _ in range(self.n)]
        for (p, q, r), val in inst.triple_terms.items():
            triple_slices[p].append((q, r, val))
            triple_slices[q].append((p, r, val))
            triple_slices[r].append((p, q, val))
        self._pairs = [
            (
                np.array([j for j, _ in sl], dtype=np.intp),
                np.array([val for _, val in sl]),
            )
            for sl in pair_slices
        ]
        self._triples = [
            (
                np.array([q for q, _, _ in sl], dtype=np.intp),
                np.array([r for _, r, _ in sl], dtype=np.intp),
                np.array([val for _, _, val in sl]),
            )
            for sl in triple_slices
        ]

    def delta_for(self, v: int) -> np.ndarray:
        """Energy change from flipping v, recomputed from current states."""
        j_idx, j_val = self._pairs[v]
        q_idx, r_idx, k_val = self._triples[v]
        local = np.zeros(self.m)
        if j_idx.size:
            local += self.s[:, j_idx] @ j_val
        if q_idx.size:
            local += (self.s[:, q_idx] * self.s[:, r_idx]) @ k_val
        return -2.0 * self.s[:, v] * local

    def uniform_block(self, n_passes: int) -> np.ndarray:
        return np.asarray([st.random(n_passes * self.n) for st in self.streams])

    def update_variable(self, v: int, beta: float, uniforms: np.ndarray) -> np.ndarray:
        accept = _acceptance(self.delta_for(v), beta, uniforms)
        if np.any(accept):
            self.s[np.where(accept)[0], v] *= -1.0
        return accept

    def temperature_step(self, beta: float, n_passes: int) -> None:
        block = self.uniform_block(n_passes)
        for p in range(n_passes):
            for v in range(self.n):
                self.update_variable(v, beta, block[:, p * self.n + v])

    def energies(self) -> np.ndarray:
        return batch_energies(self.inst, self.s)


def _anneal(annealer, inst, config: SaConfig, solver_name: str, timer) -> SolverRun:
    betas = beta_schedule(config.t0, config.t1, config.n_steps)
    trace = []
    best_so_far = np.inf
    with timer.phase("compute"):
        for step, beta in enumerate(betas, start=1):
            annealer.temperature_step(float(beta), config.n_passes)
            if config.trace_every and (
                step % config.trace_every == 0 or step == config.n_steps
            ):
                best_so_far = min(best_so_far, float(np.min(annealer.energies())))
                trace.append((timer.elapsed(), best_so_far))

    with timer.phase("collect"):
        energies = annealer.energies()
        best = int(np.argmin(energies))
        best_energy = float(energies[best])
        if not trace or trace[-1][1] > best_energy:
            trace.append((timer.elapsed(), best_energy))

    return SolverRun(
        solver=solver_name,
        best_energy=best_energy,
        best_state=annealer.s[best].copy(),
        energies=energies,
        trace=trace,
        timing=timer.finish(),
        hyperparameters=config.describe(),
        states=annealer.s,
    )


def sa_solve_qubo(inst: IsingInstance, config: SaConfig) -> SolverRun:
    timer = PhaseTimer()
    with timer.phase("setup"):
        annealer = QuboAnnealer(inst, config.n_trajectories, config.seed)
    return _anneal(annealer, inst, config, "sa-qubo", timer)


def sa_solve_hubo(inst: HuboInstance, config: SaConfig) -> SolverRun:
    timer = PhaseTimer()
    with timer.phase("setup"):
        annealer = HuboAnnealer(inst, config.n_trajectories, config.seed)
    return _anneal(annealer, inst, config, "sa-hubo", timer)
