"""Self-checks run by ``bmsrelax validate``.

Every check compares two independent routes (reduced equations against the
brute-force oracle, closed forms against numerics, brute-force sums against
formulas) and reports the worst deviation against its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .bath import BathSpectrum, SpectralDensity
from .models import LadderModel, OracleModel, coupling_matrix, gibbs_ground_probability
from .oracle import (
    EnergyEigenbasisModel,
    build_quantum_generator,
    build_rate_generator,
    evolve,
    project_reduced,
    superposition_density,
    top_shell_density,
    uniform_density,
)
from .reduced import (
    CascadeCoefficients,
    CascadeEvaluator,
    build_ladder,
    build_two_state,
    hadamard_initial_z2,
    ladder_initial_state,
    ladder_rate_eigenvalues,
    projector_rate_z1,
    solve_ladder,
    solve_two_state,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    detail: str = ""


def _check(name: str, errors, tol: float, detail: str = "") -> CheckResult:
    err = float(np.max(errors)) if np.size(errors) else 0.0
    return CheckResult(name, bool(err <= tol), err, tol, detail)


def _bath(beta=1.5, g=2.0, gamma_zero=0.7, lamb=None) -> BathSpectrum:
    return BathSpectrum(beta, SpectralDensity("flat", g, gamma_zero), lamb or {})


def nonlocal_oracle_errors(kind: str, n: int, w: int, lam=0.1, beta=1.5, g=2.0) -> list[float]:
    """Max deviation of 2x2 reduced trajectories from projected oracle runs."""
    N = 1 << n
    bath = _bath(beta, g)
    model = EnergyEigenbasisModel.from_oracle(OracleModel(n, 1.0, w), kind)
    out = []
    for method in ("rate", "quantum"):
        gen = build_rate_generator(model, bath, lam) if method == "rate" else build_quantum_generator(
            model, bath, lam
        )
        variables = "rate" if method == "rate" else ("hadamard" if kind == "hadamard" else "quantum")
        for init, rho0 in (("uniform", uniform_density(N)), ("superposition", superposition_density(N))):
            system = build_two_state(kind, method, N, beta, lam, g, 1.0, init, w)
            tau = 1.0 / np.max(np.abs(np.linalg.eigvals(system.M)))
            times = np.linspace(0.0, 5.0 * tau, 21)
            z_oracle = project_reduced(evolve(gen, rho0, times).values, variables, w, n)
            out.append(float(np.max(np.abs(z_oracle - solve_two_state(system, times).values))))
    return out


def ladder_oracle_errors(n: int, w: int, lam=0.3, beta=1.5, g=2.0) -> list[float]:
    bath = _bath(beta, g)
    ladder = LadderModel.equidistant(n, 1.0, w)
    model = EnergyEigenbasisModel.from_ladder(ladder)
    out = []
    tau = n * n / (lam * lam * g)
    times = np.linspace(0.0, 5.0 * tau, 21)
    for method in ("rate", "quantum"):
        system = build_ladder(method, ladder, bath, lam)
        if method == "rate":
            gen, variables = build_rate_generator(model, bath, lam), "shell_populations"
        else:
            gen, variables = build_quantum_generator(model, bath, lam, sector=0.0), "shell_coherent"
        z_oracle = project_reduced(evolve(gen, top_shell_density(n, w), times).values, variables, w, n)
        z_red = solve_ladder(system, ladder_initial_state(n, "top_shell", method), times).values
        out.append(float(np.max(np.abs(z_oracle - z_red))))
    return out


def random_lamb_table(rng: np.random.Generator, omegas) -> dict[float, complex]:
    return {float(w): complex(0.0, rng.normal()) for w in omegas}


def lamb_shift_errors(seed: int = 7) -> list[float]:
    """Reduced-variable derivatives with and without a random Lamb-shift table."""
    rng = np.random.default_rng(seed)
    out = []
    cases = [("projector", "quantum", 3, 0), ("hadamard", "hadamard", 3, 5), ("hadamard", "hadamard", 2, 0)]
    for kind, variables, n, w in cases:
        N = 1 << n
        table = random_lamb_table(rng, (-1.0, 0.0, 1.0))
        model = EnergyEigenbasisModel.from_oracle(OracleModel(n, 1.0, w), kind)
        L0 = build_quantum_generator(model, _bath(lamb=table), 0.2).matrix
        L1 = build_quantum_generator(model, _bath(lamb=table), 0.2, include_lamb_shift=True).matrix
        for _ in range(3):
            X = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
            rho = X @ X.conj().T
            rho /= np.trace(rho)
            d0 = project_reduced((L0 @ rho.ravel()).reshape(N, N), variables, w, n)
            d1 = project_reduced((L1 @ rho.ravel()).reshape(N, N), variables, w, n)
            out.append(float(np.max(np.abs(d0 - d1))))
    # ladder shell sums
    n = 3
    ladder = LadderModel.equidistant(n, 1.0, 2)
    model = EnergyEigenbasisModel.from_ladder(ladder)
    table = random_lamb_table(rng, (-1.0, 0.0, 1.0))
    L0 = build_quantum_generator(model, _bath(lamb=table), 0.2).matrix
    L1 = build_quantum_generator(model, _bath(lamb=table), 0.2, include_lamb_shift=True).matrix
    N = 1 << n
    X = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    rho = X @ X.conj().T
    rho /= np.trace(rho)
    d0 = project_reduced((L0 @ rho.ravel()).reshape(N, N), "shell_coherent", 2, n)
    d1 = project_reduced((L1 @ rho.ravel()).reshape(N, N), "shell_coherent", 2, n)
    out.append(float(np.max(np.abs(d0 - d1))))
    return out


def hadamard_z2_brute_force(n: int, w: int) -> float:
    """Double sum over a, b != w of (-1)^{a.w + b.w} / N."""
    N = 1 << n
    a = np.arange(N)
    signs = np.array([(-1.0) ** bin(x & w).count("1") for x in a])
    signs[w] = 0.0
    return float(np.sum(np.outer(signs, signs)) / N)


def overlap_formula_errors(n_max: int = 10) -> list[float]:
    out = []
    for n in range(1, n_max + 1):
        for w in range(1 << n):
            out.append(abs(hadamard_initial_z2(n, w) - hadamard_z2_brute_force(n, w)))
    return out


def closed_form_errors() -> list[float]:
    out = []
    lam, g = 0.01, 2.0
    for N in (4, 16, 256):
        for eb in (N / 2.0, 57.0, 5.0 * N):
            beta = math.log(eb)
            system = build_two_state("projector", "rate", N, beta, lam, g, 1.0, "uniform")
            tau = N * N / (lam * lam * g)
            times = np.geomspace(0.1 * tau, tau, 11)
            z = solve_two_state(system, times).values[:, 0]
            out.append(float(np.max(np.abs(z - projector_rate_z1(times, N, beta, 1.0, lam, g)))))
    return out


def ladder_eigenvalue_errors() -> list[float]:
    out = []
    for n in (1, 2, 5, 12):
        for beta in (0.5, 2.0, math.inf):
            bath = BathSpectrum(beta, SpectralDensity("flat", 2.0))
            system = build_ladder("rate", LadderModel.equidistant(n), bath, 0.01)
            numeric = np.sort(np.linalg.eigvals(system.matrix()).real)
            exact = np.sort(ladder_rate_eigenvalues(n, beta, 0.01, 2.0))
            out.append(float(np.max(np.abs(numeric - exact)) / abs(exact).max()))
    return out


def near_degenerate_cascade() -> CascadeCoefficients:
    """Rate-like chain whose middle coefficients differ by one part in 1e11."""
    c = 0.01
    beta = (0.0, -1.0 * c, -2.0 * c, -2.0 * c * (1 + 1e-11), -3.0 * c)
    return CascadeCoefficients(beta, (1.0 * c, 2.0 * c, 3.0 * c, 4.0 * c))


def cascade_ivp_errors(n_values=(3, 8, 20)) -> list[float]:
    """Cascade formula vs adaptive integration, relative to max(1, |y|)."""
    cases = []
    for n in n_values:
        cases.append(CascadeCoefficients.rate(n, 0.1, 1.0))
        cases.append(CascadeCoefficients.quantum(n, 0.1, 1.0))
    cases.append(near_degenerate_cascade())
    out = []
    for coeffs in cases:
        n = coeffs.n
        M = coeffs.matrix()
        y0 = np.zeros(n + 1)
        y0[-1] = 1.0
        t_end = 5.0 / abs(min(coeffs.beta_a[1:], key=abs))
        times = np.linspace(0.0, t_end, 7)
        sol = solve_ivp(lambda t, y: M @ y, (0, t_end), y0, method="DOP853", t_eval=times,
                        rtol=1e-13, atol=1e-16)
        ev = CascadeEvaluator(coeffs)
        for k in (0, n // 2, n):
            exact = np.array([ev.y(k, t) for t in times])
            scale = np.maximum(1.0, np.abs(exact))
            out.append(float(np.max(np.abs(exact - sol.y[k]) / scale)))
    return out


def stationarity_errors() -> list[float]:
    out = []
    for kind in ("projector", "indirect", "direct", "hadamard"):
        model = EnergyEigenbasisModel.from_oracle(OracleModel(3, 1.0, 2), kind)
        bath = _bath(beta=1.2)
        R = build_rate_generator(model, bath, 0.1).matrix
        w, V = np.linalg.eig(R)
        p = np.real(V[:, np.argmin(np.abs(w))])
        p /= p.sum()
        gibbs = np.exp(-1.2 * model.energies)
        gibbs /= gibbs.sum()
        out.append(float(np.max(np.abs(p - gibbs))))
    return out


def _oracle_runs():
    for kind in ("projector", "hadamard", "direct"):
        model = EnergyEigenbasisModel.from_oracle(OracleModel(2, 1.0, 1), kind)
        gen = build_quantum_generator(model, _bath(), 0.3)
        yield evolve(gen, superposition_density(4), np.linspace(0, 400, 41)).values


def trace_errors() -> list[float]:
    return [float(np.max(np.abs(np.einsum("taa->t", rho) - 1.0))) for rho in _oracle_runs()]


def positivity_errors() -> list[float]:
    """Magnitude of any negative eigenvalue along oracle trajectories."""
    return [float(max(0.0, -np.min(np.linalg.eigvalsh(rho)))) for rho in _oracle_runs()]


def gibbs_value_errors() -> list[float]:
    return [abs(gibbs_ground_probability([0.0, 1.0], math.log(4.0), [1, 3]) - 4.0 / 7.0)]


def hadamard_involution_errors() -> list[float]:
    out = []
    for n in range(1, 9):
        A = coupling_matrix("hadamard", n)
        out.append(float(np.max(np.abs(A @ A - np.eye(1 << n)))))
    return out


SUITES: list[tuple[str, Callable[[], list[float]], float]] = [
    ("oracle_nonlocal", lambda: [e for k in ("projector", "indirect", "direct", "hadamard")
                                 for n, w in ((2, 0), (3, 5)) for e in nonlocal_oracle_errors(k, n, w)], 1e-6),
    ("oracle_ladder", lambda: ladder_oracle_errors(3, 0) + ladder_oracle_errors(4, 6), 1e-6),
    ("lamb_shift_cancellation", lamb_shift_errors, 1e-10),
    ("overlap_formula_brute_force", overlap_formula_errors, 1e-12),
    ("closed_form_projector_rate", closed_form_errors, 1e-8),
    ("ladder_rate_eigenvalues", ladder_eigenvalue_errors, 1e-10),
    ("cascade_vs_integration", cascade_ivp_errors, 1e-10),
    ("rate_stationary_gibbs", stationarity_errors, 1e-8),
    ("trace_preservation", trace_errors, 1e-10),
    ("positivity", positivity_errors, 1e-8),
    ("gibbs_closed_form", gibbs_value_errors, 1e-12),
    ("hadamard_involution", hadamard_involution_errors, 1e-12),
]


def run_validation() -> list[CheckResult]:
    results = []
    for name, func, tol in SUITES:
        try:
            results.append(_check(name, func(), tol))
        except Exception as exc:  # a crashing suite is a failed suite
            results.append(CheckResult(name, False, math.inf, tol, f"{type(exc).__name__}: {exc}"))
    return results


def report(results: list[CheckResult]) -> dict:
    return {
        "passed": all(r.passed for r in results),
        "checks": [
            {**asdict(r), "max_error": r.max_error if math.isfinite(r.max_error) else None}
            for r in results
        ],
    }
