"""Size sweeps behind the figure-reproduction commands.

Each sweep point is a top-level function of plain arguments so it can be
dispatched to a process pool.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .analysis import (
    approx_peaks,
    calibrate_beta,
    energy_weights,
    intensity,
    ladder_relaxation_time,
    peak_metrics,
    PeakMetrics,
    scaling_exponent,
    ScalingResult,
    two_state_relaxation_time,
)
from .bath import BathSpectrum, SpectralDensity
from .errors import UnreachableError
from .models import LadderModel, log_shell_degeneracy
from .reduced import (
    CascadeCoefficients,
    CascadeEvaluator,
    LadderSolution,
    build_ladder,
    build_two_state,
    ladder_initial_state,
    ladder_stationary,
)
from .trajectory import Trajectory


def parallel_map(func: Callable, items: Iterable, jobs: int = 1) -> list:
    """Ordered map, in-process for ``jobs == 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class SweepPoint:
    size: int
    beta: float
    method: str
    t_relax: float | None  # None = threshold unreachable
    stationary: float
    time_unit: float  # lam^2 g, for scale-free times

    @property
    def reachable(self) -> bool:
        return self.t_relax is not None


def fit_points(points: list[SweepPoint]) -> ScalingResult | None:
    good = [p for p in points if p.reachable and p.t_relax > 0]
    if len(good) < 4 or len(good) != len(points):
        return None
    return scaling_exponent([p.size for p in good], [p.t_relax for p in good])


# -- nonlocal couplings on the oracle spectrum ---------------------------------------


@dataclass(frozen=True)
class NonlocalTask:
    kind: str
    method: str
    N: int
    lam: float = 0.01
    g: float = 2.0
    delta_e: float = 1.0
    beta: float | None = None  # None: calibrate to target
    target: float = 0.95
    threshold: float = 0.9
    init: str = "superposition"
    w: int = 0


def nonlocal_point(task: NonlocalTask) -> SweepPoint:
    N = task.N
    beta = task.beta
    if beta is None:
        beta = calibrate_beta([0.0, task.delta_e], task.target, degeneracies=[1.0, N - 1.0])
    system = build_two_state(
        task.kind, task.method, N, beta, task.lam, task.g, task.delta_e, task.init, task.w
    )
    stationary = float(system.stationary()[0])
    try:
        t = two_state_relaxation_time(system, task.threshold)
    except UnreachableError:
        t = None
    return SweepPoint(N, beta, task.method, t, stationary, task.lam**2 * task.g)


# -- collective bit-flip ladder ------------------------------------------------------


@dataclass(frozen=True)
class LadderTask:
    method: str
    n: int
    lam: float = 0.01
    g: float = 2.0
    delta_e: float = 1.0
    energies: tuple[float, ...] | None = None
    beta: float | None = None
    target: float = 0.95
    threshold: float = 0.9
    init: str | None = None  # None: uniform for rate, superposition for quantum
    family: str = "flat"
    gamma_zero: float | None = None


def default_ladder_init(method: str) -> str:
    return "uniform" if method == "rate" else "superposition"


def ladder_point(task: LadderTask) -> SweepPoint:
    n = task.n
    if task.energies is not None:
        model = LadderModel(n, task.energies)
    else:
        model = LadderModel.equidistant(n, task.delta_e)
    beta = task.beta
    if beta is None:
        beta = calibrate_beta(
            model.energies, task.target, log_degeneracies=log_shell_degeneracy(n)
        )
    bath = BathSpectrum(beta, SpectralDensity(task.family, task.g, task.gamma_zero))
    system = build_ladder(task.method, model, bath, task.lam)
    z0 = ladder_initial_state(n, task.init or default_ladder_init(task.method), task.method)
    stationary = float(ladder_stationary(system, z0)[0])
    try:
        t = ladder_relaxation_time(system, z0, task.threshold)
    except UnreachableError:
        t = None
    return SweepPoint(n, beta, task.method, t, stationary, task.lam**2 * task.g)


# -- superradiance -------------------------------------------------------------------


@dataclass(frozen=True)
class DickeTask:
    n: int
    lam: float = 0.1
    g: float = 1.0
    omega0: float = 1.0
    beta: float = math.inf
    points: int = 5000
    linear_points: int = 300


@dataclass
class DickeResult:
    n: int
    times: np.ndarray
    intensity: dict[str, np.ndarray]
    energy: dict[str, np.ndarray]
    metrics: dict[str, PeakMetrics]
    approx: PeakMetrics
    meta: dict = field(default_factory=dict)


def dicke_grid(task: DickeTask) -> np.ndarray:
    """Linear coverage before the estimated flash plus a log-dense grid through it.

    The grid reaches 50 approximate peak times and 40 single-emitter lifetimes,
    so both the flash and the slow incoherent tail are resolved.
    """
    tp = approx_peaks(task.n, task.lam, task.g, task.omega0).t_peak
    t_end = max(50.0 * tp, 40.0 / (task.lam**2 * task.g))
    return np.unique(
        np.concatenate(
            [np.linspace(0.0, tp, task.linear_points), np.geomspace(tp / 50.0, t_end, task.points)]
        )
    )


def _cascade_curves(task: DickeTask, method: str, times):
    if method == "rate":
        coeffs = CascadeCoefficients.rate(task.n, task.lam, task.g)
    else:
        coeffs = CascadeCoefficients.quantum(task.n, task.lam, task.g)
    series = CascadeEvaluator(coeffs).series(energy_weights(method, task.n, task.omega0))
    E, dE = series.evaluate(times)
    # the cascade is solved in closed form, so the derivative is exact
    traj = Trajectory(times, np.zeros((times.size, 0)), meta={"intensity": lambda t: -dE})
    I = intensity(traj, method, task.n, task.omega0)
    return E, I, (lambda t: -float(series.derivative(t)[0]))


def _ladder_curves(task: DickeTask, method: str, times):
    from .models import DickeModel

    model = DickeModel(task.n, task.omega0).as_ladder()
    bath = BathSpectrum(task.beta, SpectralDensity("flat", task.g))
    system = build_ladder(method, model, bath, task.lam, eta=1.0)
    z0 = ladder_initial_state(task.n, "top_shell", method)
    sol = LadderSolution(system, z0, t_max=float(times[-1]))
    w = energy_weights(method, task.n, task.omega0)
    z = sol(times)
    E = z @ w
    M = system.matrix()
    dE = (z @ M.T) @ w
    traj = Trajectory(times, z, meta={"intensity": lambda t: -dE})
    I = intensity(traj, method, task.n, task.omega0)

    def func(t):
        zt = sol(t)[0]
        return -float((M @ zt) @ w)

    return E, I, func


def dicke_run(task: DickeTask) -> DickeResult:
    times = dicke_grid(task)
    out = DickeResult(task.n, times, {}, {}, {}, approx_peaks(task.n, task.lam, task.g, task.omega0))
    for method in ("rate", "quantum"):
        if math.isinf(task.beta):
            E, I, func = _cascade_curves(task, method, times)
        else:
            E, I, func = _ladder_curves(task, method, times)
        out.energy[method] = E
        out.intensity[method] = I
        out.metrics[method] = peak_metrics(times, I, func=func)
    out.meta["route"] = "cascade" if math.isinf(task.beta) else "ladder"
    return out
