"""Closed dynamics in reduced variables.

Two-variable systems for the nonlocal couplings, tridiagonal Hamming ladders
for the collective bit-flip coupling, and the zero-temperature cascade
solution of a one-directional ladder.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from .bath import BathSpectrum, SpectralDensity
from .errors import NumericalError
from .models import CouplingKind, LadderModel, eta as coupling_eta, log_shell_degeneracy
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

COND_LIMIT = 1e8


class ReducedMethod(str, enum.Enum):
    RATE = "rate"
    QUANTUM = "quantum"


class InitialState(str, enum.Enum):
    UNIFORM = "uniform"  # diagonal, equal populations
    SUPERPOSITION = "superposition"  # |s><s|
    TOP_SHELL = "top_shell"  # all weight at maximal Hamming distance


# -- two-variable systems ---------------------------------------------------------


def prefactor(kind: CouplingKind | str, N: int) -> float:
    """Scalar multiplying the projector matrices for each nonlocal coupling.

    All couplings share the projector's transition structure; the factor is the
    ratio of squared transition elements |<a|A|w>|^2 relative to 1/N^2.
    """
    kind = CouplingKind(kind)
    if kind is CouplingKind.PROJECTOR:
        return 1.0
    if kind is CouplingKind.INDIRECT:
        return N * N / (N + 1.0) ** 2
    if kind is CouplingKind.DIRECT:
        return N * N / (math.sqrt(N) + 1.0) ** 2
    if kind is CouplingKind.HADAMARD:
        return float(N)
    raise ValueError(f"{kind.value} is not a nonlocal coupling")


def projector_rate_matrix(N: int, gamma_up: float, gamma_down: float, lam: float) -> np.ndarray:
    """M^re for the single projector.  ``gamma_down`` = gamma(+dE) (emission),
    ``gamma_up`` = gamma(-dE) (absorption)."""
    return lam * lam / (N * N) * np.array(
        [[-gamma_up * (N - 1), gamma_down], [gamma_up * (N - 1), -gamma_down]]
    )


def projector_quantum_matrix(N: int, gamma_up: float, gamma_down: float, lam: float) -> np.ndarray:
    """M^qe for the single projector in the coherent variables."""
    k = N - 1.0
    return lam * lam * k * k / (N * N) * np.array(
        [[-gamma_up / k, gamma_down / (k * k)], [gamma_up, -gamma_down / k]]
    )


def hadamard_initial_z2(n: int, w: int) -> float:
    """Signed coherent variable of |s><s| for the Hadamard coupling."""
    N = 1 << n
    if not 0 <= w < N:
        raise ValueError("solution index out of range")
    return (N - 2.0) * (w == 0) + 1.0 / N


@dataclass(frozen=True)
class TwoStateSystem:
    M: np.ndarray
    z0: np.ndarray
    kind: CouplingKind
    method: ReducedMethod
    N: int
    beta: float
    lam: float
    g: float
    delta_e: float
    w: int = 0
    init: InitialState = InitialState.UNIFORM

    def stationary(self) -> np.ndarray:
        return solve_two_state_at(self, math.inf)


def build_two_state(
    kind: CouplingKind | str,
    method: ReducedMethod | str,
    N: int,
    beta: float,
    lam: float,
    g: float = 2.0,
    delta_e: float = 1.0,
    init: InitialState | str = InitialState.UNIFORM,
    w: int = 0,
    bath: BathSpectrum | None = None,
) -> TwoStateSystem:
    """Reduced 2x2 generator for a nonlocal coupling on the oracle spectrum.

    ``g`` is the spectral density at |delta_e|; pass ``bath`` instead to use
    another spectrum (``beta`` and ``g`` are then ignored).
    """
    kind = CouplingKind(kind)
    method = ReducedMethod(method)
    init = InitialState(init)
    if N < 2:
        raise ValueError("N must be >= 2")
    if kind is CouplingKind.HADAMARD and N & (N - 1):
        raise ValueError("Hadamard coupling needs N = 2^n")
    if not 0 <= w < N:
        raise ValueError("solution index out of range")
    if init is InitialState.TOP_SHELL:
        raise ValueError("top_shell initial state applies to ladders only")
    if bath is None:
        bath = BathSpectrum(beta, SpectralDensity("flat", g))
    g_up, g_down = bath.gamma(-delta_e), bath.gamma(delta_e)
    if method is ReducedMethod.RATE:
        M = projector_rate_matrix(N, g_up, g_down, lam)
    else:
        M = projector_quantum_matrix(N, g_up, g_down, lam)
    M = prefactor(kind, N) * M
    # the rate variables only see populations, which |s><s| leaves uniform
    if init is InitialState.UNIFORM or method is ReducedMethod.RATE:
        z0 = np.array([1.0 / N, (N - 1.0) / N])
    elif kind is CouplingKind.HADAMARD:
        z0 = np.array([1.0 / N, hadamard_initial_z2(N.bit_length() - 1, w)])
    else:
        z0 = np.array([1.0 / N, (N - 1.0) ** 2 / N])
    return TwoStateSystem(M, z0, kind, method, N, bath.beta, lam, g, delta_e, w, init)


def _two_state_eigs(M: np.ndarray) -> tuple[float, float]:
    """Real eigenvalues (l1 >= l2) of a 2x2 matrix with nonnegative off-diagonals."""
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    half_tr = 0.5 * (a + d)
    disc = math.sqrt(max(0.25 * (a - d) ** 2 + b * c, 0.0))
    l2 = half_tr - disc
    # product form avoids cancellation for the slow root
    det = a * d - b * c
    l1 = det / l2 if l2 != 0.0 else half_tr + disc
    # conserved-functional systems have an exact zero root; drop rounding noise
    if abs(l1) <= 1e-13 * abs(l2):
        l1 = 0.0
    return l1, l2


def two_state_propagator(M: np.ndarray, t: float) -> np.ndarray:
    """exp(M t) = e^{l1 t} [I + phi(t) (M - l1 I)], phi = (e^{(l2-l1)t} - 1)/(l2-l1).

    Exact for a 2x2 matrix with real eigenvalues; phi -> t for a double root.
    """
    l1, l2 = _two_state_eigs(M)
    d = l2 - l1
    if math.isinf(t):
        if l1 != 0.0 or d > 0:
            raise NumericalError("no finite stationary limit")
        phi = -1.0 / d if d != 0 else math.inf
        return np.eye(2) + phi * (M - l1 * np.eye(2))
    x = d * t
    phi = t if abs(x) < 1e-300 else math.expm1(x) / d
    return math.exp(l1 * t) * (np.eye(2) + phi * (M - l1 * np.eye(2)))


def solve_two_state_at(system: TwoStateSystem, t: float) -> np.ndarray:
    return two_state_propagator(system.M, t) @ system.z0


def solve_two_state(system: TwoStateSystem, times) -> Trajectory:
    times = np.asarray(times, dtype=float)
    values = np.array([solve_two_state_at(system, t) for t in times])
    return Trajectory(
        times,
        values,
        labels=("z1", "z2"),
        ground_index=0,
        meta={"ground": lambda t: solve_two_state_at(system, t)[0], "system": system},
    )


def tau_re(N: int, beta: float, delta_e: float, lam: float, g: float) -> float:
    """Rate-equation relaxation time scale of the single projector."""
    e = math.exp(beta * delta_e)
    return N * N * (e - 1.0) / (lam * lam * g * (N + e - 1.0))


def tau_me(N: int, beta: float, delta_e: float, lam: float, g: float) -> float:
    """Quantum relaxation time scale of the single projector."""
    return N * N * math.tanh(beta * delta_e / 2.0) / (lam * lam * g * (N - 1.0))


def projector_rate_z1(t, N: int, beta: float, delta_e: float, lam: float, g: float):
    """Explicit ground population of the projector rate equation, uniform start."""
    e = math.exp(beta * delta_e)
    t = np.asarray(t, dtype=float)
    rate = lam * lam * g * (N + e - 1.0) / (N * N * (e - 1.0))
    return (e - (N - 1.0) * (e - 1.0) * np.exp(-rate * t) / N) / (N + e - 1.0)


# -- Hamming ladders --------------------------------------------------------------


@dataclass(frozen=True)
class LadderSystem:
    """Tridiagonal generator dz/dt = M z over shells alpha = 0..n.

    ``lower[a] = M[a+1, a]`` (climbing), ``upper[a] = M[a, a+1]`` (descending),
    ``diag[a] = M[a, a]``.
    """

    n: int
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    method: ReducedMethod
    energies: np.ndarray = field(default=None)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def sparse(self) -> sp.csr_matrix:
        return sp.diags([self.lower, self.diag, self.upper], [-1, 0, 1], format="csr")

    def log_weights(self) -> np.ndarray:
        """log of the map z -> p: p_a = z_a / binom(n, a) for the quantum ladder."""
        if self.method is ReducedMethod.RATE:
            return np.zeros(self.n + 1)
        return -log_shell_degeneracy(self.n)


def build_ladder(
    method: ReducedMethod | str,
    ladder: LadderModel,
    bath: BathSpectrum,
    lam: float,
    eta: float | None = None,
) -> LadderSystem:
    """Shell equations for the collective bit-flip coupling.

    ``eta`` defaults to 1/n (unit-norm coupling); the Dicke problem uses 1.
    """
    method = ReducedMethod(method)
    n = ladder.n
    if eta is None:
        eta = coupling_eta(CouplingKind.COLLECTIVE_BITFLIP, n)
    E = np.asarray(ladder.energies)
    c = lam * lam * eta * eta
    a = np.arange(n + 1, dtype=float)
    # emission alpha -> alpha-1 and absorption alpha -> alpha+1, per alpha
    down = np.array([bath.gamma(E[k] - E[k - 1]) if k > 0 else 0.0 for k in range(n + 1)])
    up = np.array([bath.gamma(E[k] - E[k + 1]) if k < n else 0.0 for k in range(n + 1)])
    if method is ReducedMethod.RATE:
        lower = c * (n - a[:-1]) * up[:-1]
        upper = c * a[1:] * down[1:]
        diag = -c * (a * down + (n - a) * up)
    else:
        lower = c * (n - a[:-1]) ** 2 * up[:-1]
        upper = c * a[1:] ** 2 * down[1:]
        diag = -c * (a * (n - a + 1) * down + (n - a) * (a + 1) * up)
    return LadderSystem(n, lower, diag, upper, method, E)


def ladder_rate_eigenvalues(
    n: int, beta: float, lam: float, g: float, delta_e: float = 1.0, eta: float | None = None
) -> np.ndarray:
    """Spectrum of the equidistant rate ladder: -alpha lam^2 eta^2 g coth(beta dE / 2)."""
    if eta is None:
        eta = 1.0 / n
    coth = 1.0 if math.isinf(beta) else 1.0 / math.tanh(beta * delta_e / 2.0)
    return -np.arange(n + 1) * lam * lam * eta * eta * g * coth


def ladder_initial_state(n: int, init: InitialState | str, method: ReducedMethod | str) -> np.ndarray:
    """Shell variables of the standard initial states."""
    init, method = InitialState(init), ReducedMethod(method)
    z = np.zeros(n + 1)
    if init is InitialState.TOP_SHELL:
        z[n] = 1.0
        return z
    logb = log_shell_degeneracy(n)
    if init is InitialState.UNIFORM or method is ReducedMethod.RATE:
        return np.exp(logb - n * math.log(2.0))
    # |s><s|: every element 1/N, binom(n,a)^2 of them per shell
    return np.exp(2.0 * logb - n * math.log(2.0))


def _p_chain(system: LadderSystem):
    """Tridiagonal generator Q = W M W^{-1} of p = W z, W = diag(e^{log_weights}).

    Q has zero column sums (a birth-death chain) for both ladder methods.
    """
    lw = system.log_weights()
    lower = system.lower * np.exp(lw[1:] - lw[:-1])
    upper = system.upper * np.exp(lw[:-1] - lw[1:])
    return lower, system.diag, upper


def ladder_stationary(system: LadderSystem, z0) -> np.ndarray:
    """Long-time limit from detailed balance, normalised by the conserved weight."""
    lw = system.log_weights()
    lower, _, upper = _p_chain(system)
    with np.errstate(divide="ignore"):
        lr = np.log(lower) - np.log(upper)
    logpi = np.concatenate([[0.0], np.cumsum(lr)])
    logpi -= np.logaddexp.reduce(logpi)
    total = float(np.sum(np.asarray(z0, dtype=float) * np.exp(lw)))
    return total * np.exp(logpi - lw)


class LadderSolution:
    """Propagates a ladder from ``z0``; callable at arbitrary times."""

    def __init__(self, system: LadderSystem, z0, t_max: float | None = None, method: str = "auto"):
        self.system = system
        self.z0 = np.asarray(z0, dtype=float)
        if self.z0.shape != (system.n + 1,):
            raise ValueError(f"need {system.n + 1} shell values")
        self.lw = system.log_weights()
        self.route = None
        if method in ("auto", "eig"):
            self._try_eig()
            if self.route is None and method == "eig":
                raise NumericalError("ladder eigenvectors too ill-conditioned")
        if self.route is None:
            if t_max is None:
                raise ValueError("adaptive integration needs t_max")
            self._integrate(t_max)

    def _try_eig(self):
        lower, diag, upper = _p_chain(self.system)
        if np.any(lower <= 0) or np.any(upper <= 0):
            return
        with np.errstate(divide="ignore"):
            lr = np.log(lower) - np.log(upper)
        half = 0.5 * np.concatenate([[0.0], np.cumsum(lr)])
        # eigenvector matrix of Q is D^{1/2} V: condition = sqrt(max pi / min pi)
        if half.max() - half.min() >= math.log(COND_LIMIT):
            return
        off = np.sqrt(lower * upper)
        lam, V = eigh_tridiagonal(diag, off)
        self.route = "eig"
        self._lam = lam
        self._D = np.exp(half)
        self._V = V
        p0 = self.z0 * np.exp(self.lw)
        self._c = V.T @ (p0 / self._D)

    def _integrate(self, t_max: float):
        lower, diag, upper = _p_chain(self.system)
        Q = sp.diags([lower, diag, upper], [-1, 0, 1], format="csc")
        p0 = self.z0 * np.exp(self.lw)
        sol = solve_ivp(
            lambda t, y: Q @ y,
            (0.0, float(t_max)),
            p0,
            method="BDF",
            jac=Q,
            rtol=1e-10,
            atol=1e-14 * max(1.0, float(np.abs(p0).sum())),
            dense_output=True,
        )
        if not sol.success:
            raise NumericalError(f"ladder integration failed: {sol.message}")
        self.route = "ivp"
        self._sol = sol
        self._t_max = float(t_max)

    def p(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.route == "eig":
            out = (self._V * self._D[:, None]) @ (np.exp(np.outer(self._lam, t)) * self._c[:, None])
            return out.T
        if np.any(t > self._t_max * (1 + 1e-12)):
            raise ValueError("time beyond the integrated span")
        return self._sol.sol(np.minimum(t, self._t_max)).T

    def __call__(self, t) -> np.ndarray:
        """Shell variables z(t), one row per time."""
        return self.p(t) * np.exp(-self.lw)[None, :]

    def ground(self, t: float) -> float:
        return float(self.p(t)[0, 0])


def solve_ladder(
    system: LadderSystem, z0, times, method: str = "auto"
) -> Trajectory:
    """Shell trajectory; eigendecomposition when well conditioned, else BDF (rtol 1e-10)."""
    times = np.asarray(times, dtype=float)
    if system.n > 1000:
        raise ValueError("ladder size above 1000 not supported")
    sol = LadderSolution(system, z0, t_max=float(times.max()) if times.size else 0.0, method=method)
    values = sol(times)
    return Trajectory(
        times,
        values,
        labels=tuple(f"z{a}" for a in range(system.n + 1)),
        ground_index=0,
        meta={"ground": sol.ground, "route": sol.route, "solution": sol},
    )


# -- zero-temperature cascade -----------------------------------------------------


@dataclass(frozen=True)
class CascadeCoefficients:
    """dy_a/dt = beta_a y_a + gamma_a y_{a+1} with y(0) = (0, ..., 0, 1)."""

    beta_a: tuple[float, ...]
    gamma_a: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "beta_a", tuple(float(b) for b in self.beta_a))
        object.__setattr__(self, "gamma_a", tuple(float(g) for g in self.gamma_a))
        if len(self.gamma_a) != len(self.beta_a) - 1:
            raise ValueError("need one feeding coefficient fewer than decay coefficients")

    @property
    def n(self) -> int:
        return len(self.beta_a) - 1

    @classmethod
    def rate(cls, n: int, lam: float, g: float, eta: float = 1.0) -> "CascadeCoefficients":
        c = lam * lam * eta * eta * g
        return cls(tuple(-a * c for a in range(n + 1)), tuple((a + 1) * c for a in range(n)))

    @classmethod
    def quantum(cls, n: int, lam: float, g: float, eta: float = 1.0) -> "CascadeCoefficients":
        c = lam * lam * eta * eta * g
        return cls(
            tuple(-a * (n - a + 1) * c for a in range(n + 1)),
            tuple((a + 1) ** 2 * c for a in range(n)),
        )

    def matrix(self) -> np.ndarray:
        return np.diag(self.beta_a) + np.diag(self.gamma_a, 1)


def _perturbation_pattern(beta: list[float], rel_tol: float = 1e-8) -> list[int] | None:
    """Distinct integer multipliers for near-degenerate coefficients, or None."""
    scale = max(abs(b) for b in beta) or 1.0
    order = sorted(range(len(beta)), key=lambda i: beta[i])
    mult = [0] * len(beta)
    found = False
    run = 0
    for prev, cur in zip(order, order[1:]):
        if abs(beta[cur] - beta[prev]) < rel_tol * scale:
            run += 1
            mult[cur] = run
            found = True
        else:
            run = 0
    return mult if found else None


class CascadeEvaluator:
    """Exact product-sum solution y_k(t) with arbitrary-precision arithmetic.

    y_k(t) = G_k sum_{a>=k} c_{k,a} e^{beta_a t},  G_k = prod_{c=k}^{n-1} gamma_c,
    c_{k,a} = prod_{b>=k, b!=a} 1/(beta_a - beta_b).  Degenerate coefficients
    are split by distinct multiples of h and the result is extrapolated to h=0
    from h0, h0/2, h0/4, h0/8 (h0 = 1e-6 max|beta|).
    """

    def __init__(self, coeffs: CascadeCoefficients, extra_digits: int = 30):
        self.coeffs = coeffs
        self.extra_digits = extra_digits
        beta = list(coeffs.beta_a)
        self.pattern = _perturbation_pattern(beta)
        scale = max(abs(b) for b in beta) or 1.0
        self.hs = [0.0] if self.pattern is None else [1e-6 * scale / 2**j for j in range(4)]
        self.dps = self._choose_dps()

    def _betas(self, h: float) -> list:
        beta = [mpmath.mpf(b) for b in self.coeffs.beta_a]
        if self.pattern is not None:
            beta = [b + m * mpmath.mpf(h) for b, m in zip(beta, self.pattern)]
        return beta

    def _amplitudes(self, k: int, h: float) -> tuple[list, list]:
        """beta_a and G_k c_{k,a} for a = k..n at the working precision."""
        beta = self._betas(h)
        n = self.coeffs.n
        G = mpmath.mpf(1)
        for c in self.coeffs.gamma_a[k:]:
            G *= mpmath.mpf(c)
        amps = []
        for a in range(k, n + 1):
            prod = mpmath.mpf(1)
            for b in range(k, n + 1):
                if b != a:
                    prod *= beta[a] - beta[b]
            amps.append(G / prod)
        return beta[k:], amps

    def _all_amplitudes(self, h: float) -> list[list]:
        """c_{k,a} for every k via c_{k,a} = c_{k+1,a} / (beta_a - beta_k)."""
        beta = self._betas(h)
        n = self.coeffs.n
        rows = [None] * (n + 1)
        row = {n: mpmath.mpf(1)}
        rows[n] = dict(row)
        for k in range(n - 1, -1, -1):
            new = {}
            total = mpmath.mpf(0)
            for a, v in row.items():
                new[a] = v / (beta[a] - beta[k])
                total += new[a]
            # sum_a c_{k,a} = 0 for k < n (y_k(0) = 0)
            new[k] = -total
            g = mpmath.mpf(self.coeffs.gamma_a[k])
            row = {a: v * g for a, v in new.items()}
            rows[k] = dict(row)
        return rows

    def _choose_dps(self) -> int:
        mpmath.mp.dps = 30
        mag = 0
        for h in self.hs[-1:]:
            for row in self._all_amplitudes(h):
                for v in row.values():
                    if v != 0:
                        mag = max(mag, int(mpmath.log10(abs(v))))
        return max(30, mag + self.extra_digits)

    def _extrapolate(self, values: list):
        if len(values) == 1:
            return values[0]
        # Neville to h = 0 with nodes h_j
        hs = [mpmath.mpf(h) for h in self.hs]
        P = list(values)
        m = len(P)
        for level in range(1, m):
            for i in range(m - level):
                P[i] = (hs[i + level] * P[i] - hs[i] * P[i + 1]) / (hs[i + level] - hs[i])
        return P[0]

    def y(self, k: int, t: float) -> float:
        n = self.coeffs.n
        if not 0 <= k <= n:
            raise ValueError("index out of range")
        if t < 0:
            raise ValueError("t must be >= 0")
        with mpmath.workdps(self.dps):
            vals = []
            for h in self.hs:
                beta, amps = self._amplitudes(k, h)
                tt = mpmath.mpf(t)
                vals.append(mpmath.fsum(A * mpmath.exp(b * tt) for A, b in zip(amps, beta)))
            return float(self._extrapolate(vals))

    def series(self, weights) -> "CascadeSeries":
        """sum_k w_k y_k(t) as a sum of exponentials, ready for evaluation."""
        n = self.coeffs.n
        if len(weights) != n + 1:
            raise ValueError(f"need {n + 1} weights")
        amps = []
        with mpmath.workdps(self.dps):
            w = [mpmath.mpf(float(x)) for x in weights]
            for h in self.hs:
                A = [mpmath.mpf(0)] * (n + 1)
                for k, row in enumerate(self._all_amplitudes(h)):
                    if w[k] == 0:
                        continue
                    for a, v in row.items():
                        A[a] += w[k] * v
                amps.append(A)
            base = self._betas(0.0)
        return CascadeSeries(self, base, amps)


class CascadeSeries:
    """f(t) = sum_a A_a(h) e^{(beta_a + m_a h) t}, extrapolated to h = 0."""

    def __init__(self, evaluator: CascadeEvaluator, base: list, amps: list[list]):
        self.ev = evaluator
        self.base = base
        self.amps = amps
        self.mult = evaluator.pattern or [0] * len(base)

    def evaluate(self, times) -> tuple[np.ndarray, np.ndarray]:
        """Values and time derivatives at each time."""
        ev = self.ev
        times = np.atleast_1d(np.asarray(times, dtype=float))
        vals = np.empty(times.size)
        ders = np.empty(times.size)
        with mpmath.workdps(ev.dps):
            hs = [mpmath.mpf(h) for h in ev.hs]
            for i, t in enumerate(times):
                tt = mpmath.mpf(float(t))
                # e^{beta_a t} is shared by every perturbation size
                expo = [mpmath.exp(b * tt) for b in self.base]
                fv, fd = [], []
                for h, A in zip(hs, self.amps):
                    step = mpmath.exp(h * tt)
                    sv = mpmath.mpf(0)
                    sd = mpmath.mpf(0)
                    for a, (Aa, ea) in enumerate(zip(A, expo)):
                        m = self.mult[a]
                        term = Aa * ea * (step**m if m else 1)
                        sv += term
                        sd += term * (self.base[a] + m * h)
                    fv.append(sv)
                    fd.append(sd)
                vals[i] = float(ev._extrapolate(fv))
                ders[i] = float(ev._extrapolate(fd))
        return vals, ders

    def __call__(self, t) -> np.ndarray:
        return self.evaluate(t)[0]

    def derivative(self, t) -> np.ndarray:
        return self.evaluate(t)[1]


def cascade_solution(coeffs: CascadeCoefficients, k: int, t: float) -> float:
    """y_k(t) of the cascade started in the top level."""
    return CascadeEvaluator(coeffs).y(k, t)
