import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from bmsrelax.bath import BathSpectrum, SpectralDensity
from bmsrelax.models import LadderModel, OracleModel, gibbs_ground_probability
from bmsrelax.oracle import EnergyEigenbasisModel, build_rate_generator
from bmsrelax.reduced import (
    CascadeCoefficients,
    CascadeEvaluator,
    LadderSolution,
    build_ladder,
    build_two_state,
    cascade_solution,
    hadamard_initial_z2,
    ladder_initial_state,
    ladder_rate_eigenvalues,
    ladder_stationary,
    prefactor,
    solve_ladder,
    solve_two_state,
    tau_me,
    tau_re,
    two_state_propagator,
)
from bmsrelax.validation import hadamard_z2_brute_force, near_degenerate_cascade


def flat(beta, g=2.0):
    return BathSpectrum(beta, SpectralDensity("flat", g))


# -- two-state systems ------------------------------------------------------------


def test_projector_methods_coincide_for_two_states():
    a = build_two_state("projector", "rate", 2, 1.3, 0.1)
    b = build_two_state("projector", "quantum", 2, 1.3, 0.1)
    np.testing.assert_allclose(a.M, b.M, rtol=1e-15)


def test_hadamard_quantum_prefactor():
    base = build_two_state("projector", "quantum", 16, 2.0, 0.01)
    had = build_two_state("hadamard", "quantum", 16, 2.0, 0.01)
    np.testing.assert_allclose(had.M, 16 * base.M, rtol=1e-14)


def test_direct_rate_prefactor():
    N = 16
    base = build_two_state("projector", "rate", N, 2.0, 0.01)
    direct = build_two_state("direct", "rate", N, 2.0, 0.01)
    np.testing.assert_allclose(direct.M, N * N / (math.sqrt(N) + 1) ** 2 * base.M, rtol=1e-14)


@pytest.mark.parametrize("kind", ["projector", "indirect", "direct", "hadamard"])
def test_prefactor_against_full_rate_generator(kind):
    # aggregate the brute-force rate matrix: transitions into the ground state
    n, beta, lam = 3, 1.1, 0.1
    bath = BathSpectrum(beta, SpectralDensity("flat", 2.0, 0.5))
    R = build_rate_generator(EnergyEigenbasisModel.from_oracle(OracleModel(n, 1.0, 0), kind), bath, lam).matrix
    system = build_two_state(kind, "rate", 8, beta, lam)
    assert R[0, 1] == pytest.approx(system.M[0, 1], rel=1e-13)
    assert R[0, 0] == pytest.approx(system.M[0, 0], rel=1e-13)


def test_initial_conditions():
    N = 8
    np.testing.assert_allclose(build_two_state("projector", "quantum", N, 1.0, 0.1).z0, [1 / N, (N - 1) / N])
    s = build_two_state("projector", "quantum", N, 1.0, 0.1, init="superposition")
    np.testing.assert_allclose(s.z0, [1 / N, (N - 1) ** 2 / N])
    # rate variables see only populations
    r = build_two_state("projector", "rate", N, 1.0, 0.1, init="superposition")
    np.testing.assert_allclose(r.z0, [1 / N, (N - 1) / N])


def test_trajectory_starts_at_initial_condition():
    system = build_two_state("indirect", "quantum", 32, 2.0, 0.01, init="superposition")
    traj = solve_two_state(system, [0.0, 10.0])
    np.testing.assert_allclose(traj.values[0], system.z0, rtol=1e-15)


def test_rate_stationary_ground_value():
    system = build_two_state("projector", "rate", 4, math.log(57.0), 0.01, 2.0)
    assert system.stationary()[0] == pytest.approx(0.95, abs=1e-12)
    big = solve_two_state(system, [1e9]).values[0, 0]
    assert big == pytest.approx(0.95, abs=1e-12)


def test_quantum_uniform_init_stationary_small_and_decreasing():
    values = []
    for N in (16, 64, 256, 1024):
        beta = math.log(19 * (N - 1))
        system = build_two_state("projector", "quantum", N, beta, 0.01)
        values.append(system.stationary()[0])
        assert values[-1] < 0.2 * gibbs_ground_probability([0, 1], beta, [1, N - 1])
    assert all(b < a for a, b in zip(values, values[1:]))


def test_tau_examples():
    beta = math.log(57.0)
    ref_re = 16 * 56 / (0.0001 * 2 * 60)
    ref_me = 16 * (56 / 58) / (0.0001 * 2 * 3)
    assert ref_re == pytest.approx(74666.7, abs=0.05)
    assert ref_me == pytest.approx(25747.1, abs=0.05)
    assert tau_re(4, beta, 1.0, 0.01, 2.0) == pytest.approx(ref_re, rel=1e-13)
    assert tau_me(4, beta, 1.0, 0.01, 2.0) == pytest.approx(ref_me, rel=1e-13)


def test_tau_asymptotics():
    N = 2**20
    beta = math.log(N)
    # (e - 1)/(N + e - 1) -> 1/2 when e^{beta dE} = N
    assert tau_re(N, beta, 1.0, 0.1, 1.0) / N**2 == pytest.approx(0.5 / 0.01, rel=1e-5)
    assert tau_me(N, beta, 1.0, 0.1, 1.0) / N == pytest.approx(1 / 0.01, rel=1e-5)


def test_propagator_matches_matrix_exponential():
    from scipy.linalg import expm

    system = build_two_state("direct", "quantum", 64, 3.0, 0.02, init="superposition")
    for t in (0.0, 1.0, 1e3, 1e5):
        np.testing.assert_allclose(two_state_propagator(system.M, t), expm(system.M * t), rtol=1e-10, atol=1e-14)


def test_hadamard_initial_z2_examples():
    assert hadamard_initial_z2(2, 0) == pytest.approx(2.25, abs=1e-15)
    assert hadamard_initial_z2(2, 3) == pytest.approx(0.25, abs=1e-15)
    assert hadamard_initial_z2(1, 0) == 0.5
    assert hadamard_z2_brute_force(2, 0) == pytest.approx(2.25, abs=1e-15)
    assert hadamard_z2_brute_force(2, 3) == pytest.approx(0.25, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["indirect", "direct", "hadamard"]), st.sampled_from(["rate", "quantum"]),
       st.integers(1, 14), st.floats(0.1, 10.0), st.floats(1e-3, 0.5))
def test_prefactor_equivalence(kind, method, n, beta, lam):
    N = 1 << n
    base = build_two_state("projector", method, N, beta, lam)
    other = build_two_state(kind, method, N, beta, lam)
    np.testing.assert_allclose(other.M, prefactor(kind, N) * base.M, rtol=1e-14, atol=0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["projector", "indirect", "direct", "hadamard"]),
       st.integers(1, 14), st.floats(0.1, 10.0))
def test_rate_two_state_invariants(kind, n, beta):
    N = 1 << n
    system = build_two_state(kind, "rate", N, beta, 0.01)
    np.testing.assert_allclose(system.M.sum(axis=0), 0, atol=1e-14 * np.abs(system.M).max())
    gibbs = gibbs_ground_probability([0.0, 1.0], beta, [1, N - 1])
    assert system.stationary()[0] == pytest.approx(gibbs, rel=1e-10)
    eig = np.sort(np.linalg.eigvals(system.M).real)
    assert eig[0] < 0 and abs(eig[1]) <= 1e-10 * abs(eig[0])


# -- ladders ----------------------------------------------------------------------


def test_single_qubit_ladder_methods_coincide():
    lad = LadderModel.equidistant(1)
    a = build_ladder("rate", lad, flat(1.0), 0.1)
    b = build_ladder("quantum", lad, flat(1.0), 0.1)
    np.testing.assert_allclose(a.matrix(), b.matrix(), rtol=1e-15)


def test_quantum_ladder_coefficient():
    n, lam, beta = 3, 0.1, 1.2
    bath = flat(beta)
    system = build_ladder("quantum", LadderModel.equidistant(n), bath, lam)
    c = lam * lam / n**2
    # climbing 1 -> 2 carries (n - alpha + 1)^2 = 4 for alpha = 2
    assert system.matrix()[2, 1] == pytest.approx(c * 4 * bath.gamma(-1.0), rel=1e-14)
    assert system.matrix()[1, 2] == pytest.approx(c * 4 * bath.gamma(1.0), rel=1e-14)


def test_zero_temperature_ladder_one_directional():
    system = build_ladder("rate", LadderModel.equidistant(5), flat(math.inf), 0.1)
    assert np.all(system.lower == 0)
    assert np.all(system.upper > 0)


def test_rate_eigenvalue_example():
    ev = ladder_rate_eigenvalues(3, math.inf, 0.01, 2.0)
    np.testing.assert_allclose(ev, -np.arange(4) * 2.2222222222222222e-5, rtol=1e-14)
    assert ev[0] == 0.0
    hot, cold = ladder_rate_eigenvalues(4, 1.0, 0.01, 2.0), ladder_rate_eigenvalues(4, 2.0, 0.01, 2.0)
    ratio = (1 / math.tanh(0.5)) / (1 / math.tanh(1.0))
    np.testing.assert_allclose(hot[1:] / cold[1:], ratio, rtol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 8, 12])
@pytest.mark.parametrize("beta", [0.3, 1.0, 4.0, math.inf])
def test_rate_ladder_eigenvalues_numeric(n, beta):
    system = build_ladder("rate", LadderModel.equidistant(n), flat(beta), 0.01)
    numeric = np.sort(np.linalg.eigvals(system.matrix()).real)
    exact = np.sort(ladder_rate_eigenvalues(n, beta, 0.01, 2.0))
    np.testing.assert_allclose(numeric, exact, rtol=0, atol=1e-10 * abs(exact).max())


def test_gibbs_shells_are_fixed_point():
    n, beta = 6, 0.8
    system = build_ladder("rate", LadderModel.equidistant(n), flat(beta), 0.05)
    w = np.array([math.comb(n, a) * math.exp(-beta * a) for a in range(n + 1)])
    z0 = w / w.sum()
    traj = solve_ladder(system, z0, [0.0, 10.0, 1e5])
    np.testing.assert_allclose(traj.values, np.tile(z0, (3, 1)), atol=1e-13)


def test_zero_temperature_rate_ladder_matches_cascade():
    n, lam, g = 6, 0.1, 2.0
    system = build_ladder("rate", LadderModel.equidistant(n), flat(math.inf, g), lam)
    z0 = ladder_initial_state(n, "top_shell", "rate")
    coeffs = CascadeCoefficients.rate(n, lam, g, eta=1 / n)
    t_end = 10 * n * n / (lam * lam * g)
    times = np.linspace(0, t_end, 11)
    z = solve_ladder(system, z0, times).values
    ev = CascadeEvaluator(coeffs)
    ref = np.array([[ev.y(k, t) for k in range(n + 1)] for t in times])
    np.testing.assert_allclose(z, ref, atol=1e-8)


def test_ladder_routes_agree():
    n = 12
    system = build_ladder("quantum", LadderModel.equidistant(n), flat(1.0), 0.05)
    z0 = ladder_initial_state(n, "superposition", "quantum")
    times = np.linspace(0, 2e4, 9)
    a = LadderSolution(system, z0, method="eig")(times)
    b = LadderSolution(system, z0, t_max=times[-1], method="ivp")(times)
    np.testing.assert_allclose(a, b, rtol=1e-7, atol=1e-10)


def test_ladder_stationary_matches_long_time():
    n = 10
    for method, init in (("rate", "uniform"), ("quantum", "superposition"), ("quantum", "top_shell")):
        system = build_ladder(method, LadderModel.equidistant(n), flat(1.5), 0.1)
        z0 = ladder_initial_state(n, init, method)
        late = solve_ladder(system, z0, [0.0, 1e7]).values[-1]
        np.testing.assert_allclose(ladder_stationary(system, z0), late, rtol=1e-8, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.floats(0.1, 8.0), st.integers(0, 2**32 - 1))
def test_rate_ladder_conserves_probability(n, beta, seed):
    rng = np.random.default_rng(seed)
    E = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 2.0, n))])
    system = build_ladder("rate", LadderModel(n, tuple(E)), flat(beta), 0.1)
    z0 = rng.dirichlet(np.ones(n + 1))
    traj = solve_ladder(system, z0, np.geomspace(1e-2, 1e6, 12))
    np.testing.assert_allclose(traj.values.sum(axis=1), 1.0, atol=1e-10)
    assert np.all(system.lower >= 0) and np.all(system.upper >= 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 60), st.floats(0.1, 8.0), st.sampled_from(["superposition", "top_shell", "uniform"]))
def test_quantum_ladder_shell_bound(n, beta, init):
    system = build_ladder("quantum", LadderModel.equidistant(n), flat(beta), 0.1)
    z0 = ladder_initial_state(n, init, "quantum")
    traj = solve_ladder(system, z0, np.geomspace(1e-1, 1e7, 15))
    binom = np.array([math.comb(n, a) for a in range(n + 1)], dtype=float)
    assert np.all(traj.values <= binom * (1 + 1e-8))


def test_ladder_size_limit():
    system = build_ladder("rate", LadderModel.equidistant(1001), flat(1.0), 0.1)
    with pytest.raises(ValueError):
        solve_ladder(system, ladder_initial_state(1001, "uniform", "rate"), [0.0, 1.0])


# -- cascade ----------------------------------------------------------------------


def mp_reference(coeffs, t, dps=60):
    """y(t) = expm(M t) e_n in high precision."""
    with mpmath.workdps(dps):
        M = mpmath.matrix(coeffs.matrix().tolist())
        col = mpmath.expm(M * mpmath.mpf(t))[:, coeffs.n]
        return [float(x) for x in col]


def test_cascade_trivial_cases():
    coeffs = CascadeCoefficients.quantum(5, 0.1, 1.0)
    for t in (0.0, 3.0, 40.0):
        assert cascade_solution(coeffs, 5, t) == pytest.approx(math.exp(coeffs.beta_a[5] * t), rel=1e-14)
    for k in range(5):
        assert cascade_solution(coeffs, k, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_cascade_rate_n3_against_integration():
    coeffs = CascadeCoefficients.rate(3, 0.1, 1.0)
    times = [0.5, 20.0, 150.0, 600.0]
    sol = solve_ivp(lambda t, y: coeffs.matrix() @ y, (0, 600), [0, 0, 0, 1.0], method="DOP853",
                    t_eval=times, rtol=1e-13, atol=1e-16)
    for i, t in enumerate(times):
        assert cascade_solution(coeffs, 0, t) == pytest.approx(sol.y[0, i], abs=1e-10)


@pytest.mark.parametrize("family", ["rate", "quantum"])
def test_cascade_against_high_precision_exponential(family):
    coeffs = getattr(CascadeCoefficients, family)(12, 0.1, 1.0)
    ev = CascadeEvaluator(coeffs)
    for t in (1.0, 10.0, 100.0):
        ref = mp_reference(coeffs, t)
        got = [ev.y(k, t) for k in range(13)]
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-14)


def test_cascade_near_degenerate():
    coeffs = near_degenerate_cascade()
    ev = CascadeEvaluator(coeffs)
    assert ev.pattern is not None
    for t in (1.0, 100.0, 700.0):
        ref = mp_reference(coeffs, t)
        for k in range(coeffs.n + 1):
            assert ev.y(k, t) == pytest.approx(ref[k], abs=1e-10)


def test_cascade_exactly_degenerate():
    c = 0.02
    coeffs = CascadeCoefficients((0.0, -c, -c, -2 * c), (c, 2 * c, 3 * c))
    ev = CascadeEvaluator(coeffs)
    for t in (5.0, 50.0):
        ref = mp_reference(coeffs, t)
        np.testing.assert_allclose([ev.y(k, t) for k in range(4)], ref, atol=1e-10)


def test_cascade_series_matches_pointwise():
    coeffs = CascadeCoefficients.quantum(8, 0.1, 1.0)
    ev = CascadeEvaluator(coeffs)
    w = np.arange(9) - 4.0
    series = ev.series(w)
    times = np.array([0.0, 2.0, 9.0])
    vals, ders = series.evaluate(times)
    ref = [sum(w[k] * ev.y(k, t) for k in range(9)) for t in times]
    np.testing.assert_allclose(vals, ref, rtol=1e-12, atol=1e-14)
    # derivative from the generator applied to the state
    for t, d in zip(times, ders):
        y = np.array([ev.y(k, t) for k in range(9)])
        assert d == pytest.approx(w @ (coeffs.matrix() @ y), rel=1e-10, abs=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 12), st.floats(0.0, 50.0))
def test_cascade_rate_sums_to_one(n, t):
    # zero-temperature rate cascade keeps total probability
    ev = CascadeEvaluator(CascadeCoefficients.rate(n, 0.1, 1.0))
    assert sum(ev.y(k, t) for k in range(n + 1)) == pytest.approx(1.0, abs=1e-12)
