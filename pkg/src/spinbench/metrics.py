"""Time-to-epsilon, approximation-ratio, and power-law scaling metrics.

Time-to-epsilon converts a per-run time t_f and an empirical success
probability p into the expected time to hit the target at 99% confidence:

    TTe = t_f * log(1 - 0.99) / log(1 - p)

Success means finding energy E <= E0 + eps*|E0| against the ground (or
reference) energy E0.  Runs that never succeed propagate as +inf through
medians and are excluded from scaling fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# fixed confidence constant from the definition; not configurable
_LOG_MISS = math.log(1.0 - 0.99)

NOT_REACHED = math.inf


@dataclass(frozen=True)
class SuccessEstimate:
    p_hat: float
    n_runs: int
    threshold_energy: float

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError("p_hat must lie in [0, 1]")


@dataclass(frozen=True)
class FitResult:
    alpha: float
    alpha_stderr: float
    prefactor: float
    fit_range: tuple

    @property
    def n_min(self):
        return self.fit_range[0]

    @property
    def n_max(self):
        return self.fit_range[1]


def time_to_epsilon(t_f: float, p: float, infinite_on_zero: bool = False) -> float:
    """Expected time to reach the target at 99% confidence.

    p = 1 returns 0 (one run always suffices); p = 0 raises unless
    ``infinite_on_zero`` asks for +inf.
    """
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0:
        if infinite_on_zero:
            return math.inf
        raise ValueError("success probability is zero (pass infinite_on_zero=True)")
    if p == 1.0:
        return 0.0
    return t_f * _LOG_MISS / math.log(1.0 - p)


def estimate_success(run_energies, e0: float, epsilon: float) -> SuccessEstimate:
    """Fraction of runs with E <= e0 + epsilon*|e0|."""
    energies = np.asarray(run_energies, dtype=np.float64)
    if energies.size == 0:
        raise ValueError("no run energies")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    threshold = e0 + epsilon * abs(e0)
    successes = int(np.count_nonzero(energies <= threshold))
    return SuccessEstimate(
        p_hat=successes / energies.size,
        n_runs=int(energies.size),
        threshold_energy=float(threshold),
    )


def approximation_ratio(e: float, e_gs: float) -> float:
    """R = e / e_gs for negative ground energies; R = 1 is optimal."""
    if e_gs >= 0:
        raise ValueError("approximation ratio needs a negative ground energy")
    if e < e_gs:
        raise ValueError("energy below the stated ground energy")
    return e / e_gs


def time_to_ratio(trace, e_gs: float, target_r: float) -> float:
    """Earliest trace time whose energy reaches the target ratio;
    NOT_REACHED (+inf) when the trace never qualifies."""
    if not trace:
        raise ValueError("empty trace")
    last_t = -math.inf
    for t, energy in trace:
        if t < last_t:
            raise ValueError("trace timestamps must be non-decreasing")
        last_t = t
        if approximation_ratio(energy, e_gs) >= target_r:
            return float(t)
    return NOT_REACHED


def success_fraction(per_instance_best_r, threshold: float) -> float:
    """Fraction of instances whose best ratio meets the threshold."""
    values = list(per_instance_best_r)
    if not values:
        raise ValueError("empty ratio list")
    return sum(1 for r in values if r >= threshold) / len(values)


def median_tte(tte_values) -> float:
    """Median with censored (+inf) entries; even counts take the lower of
    the two central values."""
    values = sorted(tte_values)
    if not values:
        raise ValueError("empty value list")
    return values[(len(values) - 1) // 2]


def fit_power_law(points) -> FitResult:
    """Least-squares line in log-log space through (N, value) points.

    Censored (+inf) values must be filtered out by the caller; this fit
    requires at least three positive finite points.
    """
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise ValueError("power-law fit needs at least 3 points")
    if any(n <= 0 or v <= 0 or not math.isfinite(v) for n, v in pts):
        raise ValueError("power-law fit needs positive finite data")
    x = np.log(np.array([n for n, _ in pts]))
    y = np.log(np.array([v for _, v in pts]))
    x_mean = x.mean()
    y_mean = y.mean()
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0.0:
        raise ValueError("all sizes identical; cannot fit a slope")
    slope = float(np.sum((x - x_mean) * (y - y_mean)) / sxx)
    intercept = y_mean - slope * x_mean
    residuals = y - (slope * x + intercept)
    dof = len(pts) - 2
    if dof > 0:
        stderr = math.sqrt(float(np.sum(residuals**2)) / dof / sxx)
    else:
        stderr = 0.0
    ns = [n for n, _ in pts]
    return FitResult(
        alpha=slope,
        alpha_stderr=stderr,
        prefactor=math.exp(intercept),
        fit_range=(min(ns), max(ns)),
    )
