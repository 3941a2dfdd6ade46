import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmsrelax.models import (
    CouplingKind,
    DickeModel,
    LadderModel,
    OracleModel,
    coupling_matrix,
    eta,
    gibbs_ground_probability,
    hamming_distance,
    hamming_shells,
    log_shell_degeneracy,
    matrix_element,
    shell_degeneracy,
)


def test_eta_values():
    assert eta("indirect", 4) == pytest.approx(0.8, abs=1e-15)
    assert eta("projector", 17) == 1.0
    assert eta("hadamard", 64) == 1.0
    assert eta("collective_bitflip", 10) == pytest.approx(0.1, abs=1e-15)
    assert eta("direct", 16) == pytest.approx(4 / 5, abs=1e-15)
    with pytest.raises(ValueError):
        eta("projector", 0)


def test_hadamard_element_diagonal():
    # 3 & 3 = 0b11 has two ones, so the sign is +1 and the scale 1/sqrt(4)
    assert matrix_element("hadamard", 3, 3, 2) == pytest.approx(0.5, abs=1e-15)
    assert matrix_element("hadamard", 1, 3, 2) == pytest.approx(-0.5, abs=1e-15)


def test_projector_elements_uniform():
    n = 3
    for a, b in itertools.product(range(8), repeat=2):
        assert matrix_element("projector", a, b, n) == 1 / 8


def test_bitflip_elements():
    n = 4
    for a, b in itertools.product(range(16), repeat=2):
        expected = 0.25 if bin(a ^ b).count("1") == 1 else 0.0
        assert matrix_element("collective_bitflip", a, b, n) == expected


@pytest.mark.parametrize("kind", [k.value for k in CouplingKind])
def test_matrix_matches_elements(kind):
    n, w = 3, 5
    A = coupling_matrix(kind, n, w)
    ref = np.array([[matrix_element(kind, a, b, n, w) for b in range(8)] for a in range(8)])
    np.testing.assert_allclose(A, ref, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(A, A.T)


def test_hamming_distance():
    assert hamming_distance("1011010101", "0000000000") == 6
    assert hamming_distance("0110", "0110") == 0
    assert hamming_distance("0110", "1001") == 4
    with pytest.raises(ValueError):
        hamming_distance("01", "011")


def test_shell_degeneracy():
    assert shell_degeneracy(4, 2) == 6
    assert shell_degeneracy(7, 0) == 1
    assert shell_degeneracy(10, 6) == 210
    with pytest.raises(ValueError):
        shell_degeneracy(3, 4)
    # log form at n = 400 against exact big integers
    logs = log_shell_degeneracy(400)
    for alpha in (0, 1, 57, 200, 399):
        assert logs[alpha] == pytest.approx(math.log(math.comb(400, alpha)), rel=1e-13, abs=1e-13)


def test_hamming_shells_relative_to_solution():
    shells = hamming_shells(3, 0b101)
    assert shells[0b101] == 0
    assert shells[0b010] == 3
    assert shells[0b100] == 1


def test_gibbs_examples():
    # oracle N=4 with e^{beta dE} = 4: 1/(1 + 3/4)
    p = gibbs_ground_probability(OracleModel(2).energies(), math.log(4.0))
    assert p == pytest.approx(4 / 7, rel=1e-14)
    assert gibbs_ground_probability([0.0, 1.0, 1.0, 2.0], math.inf) == 1.0
    assert gibbs_ground_probability(OracleModel(3).energies(), 0.0) == pytest.approx(1 / 8, rel=1e-14)
    # level form agrees with the per-state form
    lv, deg = OracleModel(3).levels()
    assert gibbs_ground_probability(lv, 1.3, degeneracies=deg) == pytest.approx(
        gibbs_ground_probability(OracleModel(3).energies(), 1.3), rel=1e-14
    )


def test_model_validation():
    with pytest.raises(ValueError):
        OracleModel(2, 1.0, 4)
    with pytest.raises(ValueError):
        LadderModel(2, (0.0, 2.0, 1.0))
    with pytest.raises(ValueError):
        LadderModel(2, (0.0, 1.0))


def test_dicke_as_ladder():
    lad = DickeModel(4, 2.0).as_ladder()
    assert lad.energies == (-4.0, -2.0, 0.0, 2.0, 4.0)
    assert lad.spacing() == pytest.approx(2.0)
    assert LadderModel(2, (0.0, 1.0, 3.0)).spacing() is None


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["projector", "indirect", "direct", "hadamard", "collective_bitflip"]),
       st.integers(1, 8), st.data())
def test_norm_bound(kind, n, data):
    w = data.draw(st.integers(0, (1 << n) - 1))
    norm = np.linalg.norm(coupling_matrix(kind, n, w), 2)
    if kind == "indirect":
        # largest eigenvalue is N/(N+1) (1 + 1/sqrt(N)); the stated eta leaves it above 1
        N = 1 << n
        assert norm == pytest.approx(N / (N + 1) * (1 + 1 / math.sqrt(N)), rel=1e-12)
    else:
        assert norm <= 1 + 1e-12


@pytest.mark.parametrize("n", range(1, 9))
def test_hadamard_involution(n):
    A = coupling_matrix("hadamard", n)
    np.testing.assert_allclose(A @ A, np.eye(1 << n), rtol=0, atol=1e-12)


@given(st.integers(0, 60))
def test_shell_counting(n):
    assert sum(shell_degeneracy(n, a) for a in range(n + 1)) == 2**n


@given(st.lists(st.floats(0.01, 5.0), min_size=1, max_size=8), st.floats(0.0, 20.0))
def test_gibbs_lower_bound(gaps, beta):
    E = np.concatenate([[0.0], np.cumsum(sorted(gaps))])
    N = E.size
    p = gibbs_ground_probability(E, beta)
    assert p >= 1.0 / (1.0 + N * math.exp(-beta * (E[1] - E[0]))) * (1 - 1e-12)
