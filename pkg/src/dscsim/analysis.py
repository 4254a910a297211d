"""Bridges between simulation output and mean-field theory.

Plateau extraction from trajectories, back-out of the empirical contact
rate, calibration of the order-unity factor g, power-law fitting of
scaling relations, and a goodness-of-fit check for the environment
sampler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import environment
from .environment import ConcentrationModel


@dataclass(frozen=True)
class FitResult:
    """Log-log power-law fit y ~ exp(intercept) * x**exponent."""

    exponent: float
    intercept: float
    r_squared: float


def extract_plateau(
    trajectory, tail_fraction: float = 0.25, check_stationary: bool = True
) -> tuple[float, float]:
    """Mean and std of the trajectory over its final tail_fraction.

    With check_stationary (the default) a tail whose linear trend exceeds
    twice its standard deviation is rejected as not yet saturated. Batch
    consumers that record raw tail statistics for every run, including
    dying ones, pass check_stationary=False.
    """
    y = np.asarray(trajectory, dtype=float)
    if y.size < 10:
        raise ValueError(f"trajectory too short: {y.size} < 10 points")
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must be in (0, 1]")
    k = max(1, int(np.ceil(y.size * tail_fraction)))
    tail = y[-k:]
    mean = float(tail.mean())
    std = float(tail.std())
    if check_stationary and k >= 3:
        slope = np.polyfit(np.arange(k), tail, 1)[0]
        trend = abs(slope) * (k - 1)
        roundoff = 1e-9 * (1.0 + abs(mean))  # polyfit noise on constant tails
        if trend > 2.0 * std + roundoff:
            raise ValueError(
                f"tail not stationary: linear trend {trend:.3g} exceeds 2 x std {std:.3g}"
            )
    return mean, std


def alpha_from_sim(plateau_active_fraction: float, tau_star: float, n: int) -> float:
    """Contact rate implied by a saturated active fraction.

    Inverts theta = 1 / (alpha tau_star n) at theta = 1 - plateau:
    alpha_s = 1 / (tau_star * n * (1 - plateau)). Only meaningful for a
    genuinely supercritical plateau in (0, 1).
    """
    if not 0.0 < plateau_active_fraction < 1.0:
        raise ValueError(
            f"plateau must be in (0, 1), got {plateau_active_fraction}"
        )
    return 1.0 / (tau_star * n * (1.0 - plateau_active_fraction))


def calibrate_g(pairs) -> float:
    """Least-squares slope through the origin of alpha_sim vs alpha_theory(g=1).

    pairs: iterable of (alpha_sim, alpha_theory_at_g1), all positive.
    """
    arr = np.asarray(list(pairs), dtype=float)
    if arr.size == 0:
        raise ValueError("calibrate_g needs at least one pair")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must be (alpha_sim, alpha_theory) tuples")
    if np.any(arr <= 0):
        raise ValueError("all rates must be positive")
    sim, theory = arr[:, 0], arr[:, 1]
    return float(np.dot(sim, theory) / np.dot(theory, theory))


def fit_power_law(xs, ys) -> FitResult:
    """Ordinary least squares on (log x, log y)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3 or y.size != x.size:
        raise ValueError("need at least 3 matching (x, y) points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit requires positive data")
    lx, ly = np.log(x), np.log(y)
    design = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(exponent=float(slope), intercept=float(intercept), r_squared=r2)


def ks_distance(samples, model: ConcentrationModel) -> float:
    """Kolmogorov-Smirnov distance between samples and the analytic cdf.

    Handles the atom at zero by the right-continuous convention: the
    analytic cdf jumps to 1 - omega at c = 0, and its left limit there
    is 0.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    m = xs.size
    if m == 0:
        raise ValueError("need at least one sample")
    f_right = np.asarray(environment.cdf(model, xs))
    f_left = np.where(xs == 0.0, 0.0, f_right)
    grid = np.arange(1, m + 1) / m
    d_plus = float(np.max(grid - f_right))
    d_minus = float(np.max(f_left - (grid - 1.0 / m)))
    return max(d_plus, d_minus, 0.0)
