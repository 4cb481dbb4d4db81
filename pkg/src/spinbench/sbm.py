"""Discrete simulated bifurcation solver with ternary drive and walls.

The dynamics integrate, per replica,

    q' = q + a0 dt p
    p' = p + dt [ -(a0 - a(t)) q' + c0 (D f(q') + d) ]

with linear pump a(t) = t/T, ternary discretization f (threshold grows as
0.7 t/T), and perfectly inelastic walls: any |q_i| > 1 is snapped to
sign(q_i) with its momentum zeroed.  D and d are the drive matrix and
vector.  Aligning spins with their local field maximizes the energy
convention used by :func:`spinbench.model.ising_energy`, so the solver
drives with the negated couplings and fields; binarizing the final
positions then yields low-energy states.

Replicas evolve independently from uniform random starts; each replica
draws its own time step from a log-uniform range, so slow and fast
schedules are explored in one call.  Replica r derives all randomness from
the r-th spawn of the master seed, which makes results independent of how
replicas are batched or scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import IsingInstance
from .runs import PhaseTimer, SolverRun

DEFAULT_DT_RANGE = (0.25, 1.25)


@dataclass(frozen=True)
class SbmConfig:
    a0: float = 1.0
    c0_override: float | None = None
    n_steps: int = 1000
    dt: float | None = None  # fixed step; when None, draw per replica
    dt_range: tuple = DEFAULT_DT_RANGE
    n_replicas: int = 512
    seed: int = 0
    trace_every: int | None = None

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.n_replicas < 1:
            raise ValueError("n_replicas must be >= 1")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        lo, hi = self.dt_range
        if not (0 < lo <= hi):
            raise ValueError("dt_range must satisfy 0 < lo <= hi")

    def describe(self) -> dict:
        return {
            "a0": self.a0,
            "c0_override": self.c0_override,
            "n_steps": self.n_steps,
            "dt": self.dt,
            "dt_range": list(self.dt_range),
            "n_replicas": self.n_replicas,
            "seed": self.seed,
            "trace_every": self.trace_every,
        }


def default_c0(inst: IsingInstance, a0: float = 1.0) -> float:
    """0.7 a0 / (sigma sqrt(N)) with sigma the root mean square of the
    off-diagonal entries of the symmetrized dense coupling matrix."""
    J, _ = inst.dense()
    n = inst.n
    off = J[~np.eye(n, dtype=bool)]
    sigma = float(np.sqrt(np.mean(off**2))) if off.size else 0.0
    if sigma == 0.0:
        raise ValueError("all couplings are zero; set c0 explicitly")
    return 0.7 * a0 / (sigma * np.sqrt(n))


def ternary_f(x, t: float, total_time: float):
    """Three-level discretization: 0 inside the growing threshold
    0.7 t/T, otherwise the sign (with sign(x >= 0) = +1)."""
    x = np.asarray(x, dtype=np.float64)
    threshold = 0.7 * t / total_time
    signs = np.where(x >= 0, 1.0, -1.0)
    return np.where(np.abs(x) <= threshold, 0.0, signs)


def sbm_step(q, p, drive_matrix, drive_fields, *, a0, c0, dt, t, total_time):
    """One in-place integrator step on (replicas, n) position/momentum
    arrays; dt may be scalar or an (replicas, 1) column."""
    q += a0 * dt * p
    pump = t / total_time
    f = ternary_f(q, t, total_time)
    p += dt * (-(a0 - pump) * q + c0 * (f @ drive_matrix + drive_fields))
    walls = np.abs(q) > 1.0
    if np.any(walls):
        q[walls] = np.sign(q[walls])
        p[walls] = 0.0
    return q, p


def _binarize(q) -> np.ndarray:
    return np.where(q >= 0, 1.0, -1.0)


def sbm_solve(inst: IsingInstance, config: SbmConfig) -> SolverRun:
    timer = PhaseTimer()
    with timer.phase("setup"):
        J, h = inst.dense()
        drive_matrix = -J
        drive_fields = -h
        c0 = (
            config.c0_override
            if config.c0_override is not None
            else default_c0(inst, config.a0)
        )
        n = inst.n
        reps = config.n_replicas
        children = np.random.SeedSequence(config.seed).spawn(reps)
        dt_col = np.empty((reps, 1))
        q = np.empty((reps, n))
        p = np.empty((reps, n))
        lo, hi = config.dt_range
        for r, child in enumerate(children):
            rng = np.random.default_rng(child)
            # per-replica draw order: time step, then positions, then momenta
            if config.dt is not None:
                dt_col[r, 0] = config.dt
            else:
                dt_col[r, 0] = np.exp(rng.uniform(np.log(lo), np.log(hi)))
            q[r] = rng.uniform(-1.0, 1.0, size=n)
            p[r] = rng.uniform(-1.0, 1.0, size=n)

    trace = []
    best_so_far = np.inf
    with timer.phase("compute"):
        for j in range(1, config.n_steps + 1):
            # per-replica time is j*dt_r, total time n_steps*dt_r: the pump
            # progress j/n_steps is shared, so pass a common clock
            sbm_step(
                q,
                p,
                drive_matrix,
                drive_fields,
                a0=config.a0,
                c0=c0,
                dt=dt_col,
                t=float(j),
                total_time=float(config.n_steps),
            )
            if config.trace_every and (
                j % config.trace_every == 0 or j == config.n_steps
            ):
                s = _binarize(q)
                energies = 0.5 * np.einsum("ri,ij,rj->r", s, J, s) + s @ h
                best_so_far = min(best_so_far, float(np.min(energies)))
                trace.append((timer.elapsed(), best_so_far))

    with timer.phase("collect"):
        s = _binarize(q)
        energies = 0.5 * np.einsum("ri,ij,rj->r", s, J, s) + s @ h
        best = int(np.argmin(energies))
        best_energy = float(energies[best])
        best_state = s[best].copy()
        if not trace or trace[-1][1] > best_energy:
            trace.append((timer.elapsed(), best_energy))

    return SolverRun(
        solver="sbm",
        best_energy=best_energy,
        best_state=best_state,
        energies=energies,
        trace=trace,
        timing=timer.finish(),
        hyperparameters={**config.describe(), "c0": c0},
    )
