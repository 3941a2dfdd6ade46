"""Observables extracted from trajectories.

Temperature calibration, relaxation times, power-law scaling fits and the
superradiance intensity metrics.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import bisect, brentq

from .errors import GridTooCoarseError, NumericalError, UnreachableError
from .models import gibbs_ground_probability, log_shell_degeneracy
from .reduced import (
    LadderSolution,
    LadderSystem,
    ReducedMethod,
    TwoStateSystem,
    _p_chain,
    _two_state_eigs,
    ladder_stationary,
    solve_two_state,
)
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

BETA_CAP = 1e6
MIN_PEAK_SAMPLES = 50
FWHM_LEVEL = math.log((math.sqrt(2.0) + 1.0) / (math.sqrt(2.0) - 1.0))


# -- calibration ------------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationTarget:
    target: float = 0.95
    threshold: float = 0.9

    def __post_init__(self):
        if not 0 < self.threshold < self.target <= 1:
            raise ValueError("need 0 < threshold < target <= 1")


def calibrate_beta(
    energies: Sequence[float],
    target: float = 0.95,
    degeneracies=None,
    log_degeneracies=None,
    cap: float = BETA_CAP,
) -> float:
    """Inverse temperature whose Gibbs state has ground probability ``target``."""
    E = np.asarray(energies, dtype=float)

    def p0(beta):
        return gibbs_ground_probability(E, beta, degeneracies, log_degeneracies)

    lo = 0.0
    if not p0(lo) < target < 1.0:
        raise ValueError(f"target {target} outside ({p0(lo):.6g}, 1)")
    hi = 1.0 / max(float(np.max(E - E[0])), 1e-300)
    while p0(hi) < target:
        hi *= 2.0
        if hi > cap:
            raise ValueError(f"target {target} needs beta above the cap {cap:g}")
    return bisect(lambda b: p0(b) - target, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=2000)


def oracle_beta(N: int, target: float = 0.95, delta_e: float = 1.0) -> float:
    """Closed form for the oracle spectrum: e^{beta dE} = (N-1) p / (1-p)."""
    return math.log((N - 1.0) * target / (1.0 - target)) / delta_e


# -- relaxation times -------------------------------------------------------------


def relaxation_time(
    trajectory: Trajectory,
    threshold: float = 0.9,
    stationary: float | None = None,
    ground: Callable[[float], float] | None = None,
) -> float:
    """First time the ground population reaches ``threshold``.

    The crossing is bracketed on the sample grid and refined on ``ground`` (or
    ``trajectory.meta['ground']``) to relative 1e-8; without a continuous
    solution the bracket is interpolated linearly.
    """
    P = trajectory.ground_population()
    t = np.asarray(trajectory.times)
    if P[0] >= threshold:
        return 0.0
    if stationary is None:
        stationary = trajectory.meta.get("stationary", P[-1])
    if stationary < threshold:
        raise UnreachableError(float(stationary), threshold)
    above = np.flatnonzero(P >= threshold)
    if above.size == 0:
        raise NumericalError("threshold not reached within the sampled time span")
    i = int(above[0])
    if np.any(np.diff(P[: i + 1]) < -1e-12 * max(1.0, abs(P[i]))):
        logger.warning("ground population is not monotone before the crossing")
    ground = ground or trajectory.meta.get("ground")
    a, b = float(t[i - 1]), float(t[i])
    if ground is None:
        return a + (threshold - P[i - 1]) * (b - a) / (P[i] - P[i - 1])
    return brentq(lambda s: ground(s) - threshold, a, b, xtol=1e-12 * b, rtol=1e-10)


def _log_grid(t_fast: float, t_slow: float, points: int = 400) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(t_fast * 1e-3, t_slow, points)])


def two_state_relaxation_time(system: TwoStateSystem, threshold: float = 0.9) -> float:
    """Relaxation time of a 2x2 system, or UnreachableError."""
    stationary = float(system.stationary()[0])
    if system.z0[0] >= threshold:
        return 0.0
    if stationary < threshold:
        raise UnreachableError(stationary, threshold)
    _, l2 = _two_state_eigs(system.M)
    scale = 1.0 / abs(l2)
    traj = solve_two_state(system, _log_grid(scale, 80.0 * scale))
    return relaxation_time(traj, threshold, stationary=stationary)


def _ladder_rates(system: LadderSystem) -> tuple[float, float]:
    """Slowest nonzero and fastest relaxation rates of a ladder."""
    lower, diag, upper = _p_chain(system)
    if np.all(lower > 0) and np.all(upper > 0):
        ev = -eigvalsh_tridiagonal(diag, np.sqrt(lower * upper))
    else:
        # one-directional somewhere: triangular blocks, spectrum on the diagonal
        ev = -np.asarray(diag)
    ev = np.sort(np.abs(ev))
    nonzero = ev[ev > 1e-12 * ev[-1]]
    return float(nonzero[0]), float(ev[-1])


def ladder_relaxation_time(
    system: LadderSystem, z0, threshold: float = 0.9, points: int = 400
) -> float:
    """Relaxation time of a ladder from shell variables ``z0``."""
    z0 = np.asarray(z0, dtype=float)
    stationary = float(ladder_stationary(system, z0)[0])
    if z0[0] >= threshold:
        return 0.0
    if stationary < threshold:
        raise UnreachableError(stationary, threshold)
    slow, fast = _ladder_rates(system)
    t_end = 60.0 / slow
    sol = LadderSolution(system, z0, t_max=t_end)
    times = _log_grid(1.0 / fast, t_end, points)
    traj = Trajectory(times, sol(times), meta={"ground": sol.ground})
    return relaxation_time(traj, threshold, stationary=stationary)


# -- scaling fits -----------------------------------------------------------------


@dataclass(frozen=True)
class ScalingResult:
    sizes: np.ndarray
    times: np.ndarray
    exponent: float
    prefactor: float
    window: tuple[int, int]
    residual: float


def scaling_exponent(sizes, times) -> ScalingResult:
    """Log-log least-squares slope over the largest-size half of the samples."""
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(times, dtype=float)
    if x.size < 4 or x.size != y.size:
        raise ValueError("need at least 4 (size, time) points")
    if np.any(np.diff(x) <= 0):
        raise ValueError("sizes must be strictly increasing")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("sizes and times must be positive and finite")
    start = x.size - math.ceil(x.size / 2)
    lx, ly = np.log(x[start:]), np.log(y[start:])
    (slope, intercept), res, *_ = np.polyfit(lx, ly, 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    return ScalingResult(x, y, float(slope), float(math.exp(intercept)), (start, x.size), residual)


# -- superradiance observables ----------------------------------------------------


def energy_weights(method: ReducedMethod | str, n: int, omega0: float = 1.0) -> np.ndarray:
    """w_a with <E> = sum_a w_a z_a."""
    method = ReducedMethod(method)
    a = np.arange(n + 1)
    w = omega0 * (a - n / 2.0)
    if method is ReducedMethod.QUANTUM:
        w = w * np.exp(-log_shell_degeneracy(n))
    return w


def energy_expectation(z, method: ReducedMethod | str, n: int, omega0: float = 1.0):
    """Energy from shell variables (one vector or a stack of them)."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != n + 1:
        raise ValueError(f"need {n + 1} shell values")
    if ReducedMethod(method) is ReducedMethod.QUANTUM and np.any(z < 0):
        worst = float(z.min())
        warnings.warn(f"clamping negative shell values (min {worst:.3g}) to zero", RuntimeWarning)
        z = np.maximum(z, 0.0)
    return z @ energy_weights(method, n, omega0)


def _check_peak_sampling(I: np.ndarray, floor: float = 0.0):
    k = int(np.argmax(I))
    if I[k] <= floor:
        return
    # contiguous half-maximum region around the maximum
    above = I >= 0.5 * I[k]
    lo = k
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = k
    while hi < I.size - 1 and above[hi + 1]:
        hi += 1
    if hi - lo + 1 < MIN_PEAK_SAMPLES:
        raise GridTooCoarseError(
            f"only {hi - lo + 1} samples above half maximum (need {MIN_PEAK_SAMPLES})"
        )


def intensity(trajectory: Trajectory, method: ReducedMethod | str, n: int, omega0: float = 1.0):
    """Emitted power I = -d<E>/dt.

    Uses ``trajectory.meta['intensity']`` when an exact derivative is
    available, otherwise second-order finite differences of the energy.
    """
    exact = trajectory.meta.get("intensity")
    floor = 0.0
    if exact is not None:
        I = np.asarray(exact(trajectory.times), dtype=float)
    else:
        t = np.asarray(trajectory.times, dtype=float)
        E = energy_expectation(trajectory.values, method, n, omega0)
        I = -np.gradient(E, t, edge_order=2)
        # differences of a constant energy leave rounding noise, not a flash
        floor = 64 * np.finfo(float).eps * float(np.max(np.abs(E))) / float(np.min(np.diff(t)))
    _check_peak_sampling(I, floor)
    return I


@dataclass(frozen=True)
class PeakMetrics:
    t_peak: float
    I_peak: float
    width: float
    energy: float


def approx_intensity(n: int, lam: float, g: float, omega0: float, t):
    """Two-level approximation of the superradiant flash."""
    k = lam * lam * g * n
    t = np.asarray(t, dtype=float)
    return omega0 * k * n * (np.exp(-k * t) - np.exp(-2.0 * k * t))


def approx_peaks(n: int, lam: float, g: float, omega0: float = 1.0) -> PeakMetrics:
    """Peak position, height, FWHM and radiated energy of ``approx_intensity``."""
    k = lam * lam * g * n
    return PeakMetrics(
        t_peak=math.log(2.0) / k,
        I_peak=omega0 * k * n / 4.0,
        width=FWHM_LEVEL / k,
        energy=omega0 * n / 2.0,
    )


def _quadratic_peak(t: np.ndarray, I: np.ndarray, k: int) -> tuple[float, float]:
    x, y = t[k - 1 : k + 2], I[k - 1 : k + 2]
    c2, c1, c0 = np.polyfit(x - x[1], y, 2)
    if c2 >= 0:
        return float(t[k]), float(I[k])
    dx = -c1 / (2.0 * c2)
    if not x[0] - x[1] <= dx <= x[2] - x[1]:
        return float(t[k]), float(I[k])
    return float(x[1] + dx), float(c0 - c1 * c1 / (4.0 * c2))


def peak_metrics(times, I, func: Callable | None = None) -> PeakMetrics:
    """Peak position/height (quadratic interpolation), FWHM and trapezoid energy.

    ``func`` evaluates I at arbitrary t for root refinement; a monotone cubic
    interpolant of the samples is used otherwise.
    """
    t = np.asarray(times, dtype=float)
    I = np.asarray(I, dtype=float)
    if t.size < 3 or t.size != I.size:
        raise ValueError("need at least 3 matching samples")
    k = int(np.argmax(I))
    if k == t.size - 1 or I[k] <= 0:
        raise NumericalError("no peak within the sampled window")
    if k == 0:
        t_peak, I_peak = float(t[0]), float(I[0])
    else:
        t_peak, I_peak = _quadratic_peak(t, I, k)
    f = func if func is not None else PchipInterpolator(t, I)
    half = 0.5 * I_peak

    def g(s):
        return float(f(s)) - half

    right = k + int(np.argmax(I[k:] < half))
    if I[right] >= half:
        raise NumericalError("intensity does not fall to half maximum")
    t_right = brentq(g, t[right - 1], t[right], xtol=1e-14 * t[right], rtol=1e-12)
    if k == 0:
        t_left = t_peak
    else:
        below = np.flatnonzero(I[:k] < half)
        if below.size == 0:
            raise NumericalError("intensity does not rise from half maximum")
        j = int(below[-1])
        t_left = brentq(g, t[j], t[j + 1], xtol=1e-14 * t[j + 1], rtol=1e-12)
    return PeakMetrics(t_peak, I_peak, t_right - t_left, float(trapezoid(I, t)))


def radiated_energy(times, I) -> float:
    return float(trapezoid(np.asarray(I, dtype=float), np.asarray(times, dtype=float)))
