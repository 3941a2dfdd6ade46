"""Brute-force Born-Markov-secular master equation in the energy eigenbasis.

This is the validation oracle: it builds the full quantum master equation
(Lindblad form, single hermitian coupling operator) and the population-only
rate equation for small systems, propagates them, and projects the result onto
the reduced variables used by :mod:`bmsrelax.reduced`.

Density matrices are vectorised row-major, ``vec(rho)[a * N + b] = rho[a, b]``,
so ``vec(X rho Y) = kron(X, Y.T) @ vec(rho)``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from .bath import BathSpectrum
from .errors import NumericalError, ScaleExceededError
from .models import CouplingKind, LadderModel, OracleModel, coupling_matrix, hamming_shells
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

MAX_FULL_N = 64
MAX_SECTOR_N = 256
DENSE_MAX_N = 32
EIG_COND_LIMIT = 1e8


@dataclass(frozen=True)
class EnergyEigenbasisModel:
    """Energies E_a and real symmetric coupling elements <a|A|b>."""

    energies: np.ndarray
    coupling: np.ndarray
    energy_match_tolerance: float | None = None

    def __post_init__(self):
        E = np.asarray(self.energies, dtype=float)
        A = np.asarray(self.coupling, dtype=float)
        if E.ndim != 1 or A.shape != (E.size, E.size):
            raise ValueError("coupling must be N x N for N energies")
        if not np.all(np.isfinite(E)):
            raise ValueError("energies must be finite")
        if not np.allclose(A, A.T, rtol=0, atol=1e-14):
            raise ValueError("coupling operator must be symmetric (hermitian)")
        object.__setattr__(self, "energies", E)
        object.__setattr__(self, "coupling", A)
        if self.energy_match_tolerance is None:
            scale = max(float(np.max(np.abs(E))) if E.size else 0.0, 1.0)
            object.__setattr__(self, "energy_match_tolerance", 1e-9 * scale)

    @property
    def N(self) -> int:
        return self.energies.size

    @classmethod
    def from_oracle(cls, model: OracleModel, kind: CouplingKind | str) -> "EnergyEigenbasisModel":
        return cls(model.energies(), model.coupling(kind))

    @classmethod
    def from_ladder(cls, model: LadderModel, eta: float | None = None) -> "EnergyEigenbasisModel":
        """Collective bit-flip coupling on a Hamming ladder; ``eta`` defaults to 1/n."""
        A = coupling_matrix(CouplingKind.COLLECTIVE_BITFLIP, model.n, model.w)
        if eta is not None:
            A = A * (eta * model.n)
        return cls(model.state_energies(), A)


def bohr_decomposition(model: EnergyEigenbasisModel) -> list[tuple[float, sp.csr_matrix]]:
    """Split A into eigenoperators A(omega), [H, A(omega)] = -omega A(omega).

    A(omega) collects the elements <a|A|b> with E_b - E_a = omega (within the
    energy-match tolerance).
    """
    E, A, tol = model.energies, model.coupling, model.energy_match_tolerance
    rows, cols = np.nonzero(A)
    if rows.size == 0:
        return []
    omegas = E[cols] - E[rows]
    order = np.argsort(omegas, kind="stable")
    sorted_w = omegas[order]
    breaks = np.flatnonzero(np.diff(sorted_w) > tol) + 1
    groups = np.split(order, breaks)
    out = []
    N = model.N
    for g in groups:
        omega = float(np.mean(omegas[g]))
        if abs(omega) <= tol:
            omega = 0.0
        Ak = sp.csr_matrix((A[rows[g], cols[g]], (rows[g], cols[g])), shape=(N, N))
        out.append((omega, Ak))
    return out


@dataclass
class DampingTensor:
    """Sparse damping coefficients bar-gamma_{ab,cd} and Lamb shifts bar-sigma_{ab}."""

    gamma_bar: dict[tuple[int, int, int, int], complex] = field(default_factory=dict)
    sigma_bar: dict[tuple[int, int], complex] = field(default_factory=dict)


def damping_tensor(
    model: EnergyEigenbasisModel,
    bath: BathSpectrum,
    lam: float,
    include_lamb_shift: bool = False,
) -> DampingTensor:
    """Coefficient-by-coefficient evaluation of the damping and Lamb-shift terms.

    O(P^2) in the number P of nonzero coupling elements; meant for small N.
    """
    E, A, tol = model.energies, model.coupling, model.energy_match_tolerance
    N = model.N
    lam2 = lam * lam
    pairs = list(zip(*np.nonzero(A)))
    out = DampingTensor()
    for a, b in pairs:
        w_ab = E[b] - E[a]
        g = None
        for c, d in pairs:
            if abs((E[d] - E[c]) - w_ab) <= tol:
                if g is None:
                    g = bath.gamma(0.0 if abs(w_ab) <= tol else w_ab)
                out.gamma_bar[(a, b, c, d)] = lam2 * g * A[a, b] * np.conj(A[c, d])
    if include_lamb_shift:
        for a in range(N):
            for b in range(N):
                if abs(E[a] - E[b]) > tol:
                    continue
                acc = 0j
                for c in range(N):
                    if A[c, a] != 0 and A[c, b] != 0:
                        w = E[a] - E[c]
                        acc += bath.sigma(0.0 if abs(w) <= tol else w) * np.conj(A[c, a]) * A[c, b]
                if acc != 0:
                    out.sigma_bar[(a, b)] = lam2 / 2j * acc
    return out


def index_form_rhs(
    tensor: DampingTensor, energies: np.ndarray, rho: np.ndarray
) -> np.ndarray:
    """Time derivative of rho written out index by index from the damping tensor."""
    E = np.asarray(energies)
    N = E.size
    rho = np.asarray(rho, dtype=complex)
    out = -1j * (E[:, None] - E[None, :]) * rho
    sig = np.zeros((N, N), dtype=complex)
    for (a, b), v in tensor.sigma_bar.items():
        sig[a, b] = v
    out += -1j * (sig @ rho - rho @ sig)
    # K_{ad} = sum_c bar-gamma_{cd,ca}; the right-hand anticommutator sum
    # sum_c bar-gamma_{cb,cd} has the same index pattern, so it is K as well
    K = np.zeros((N, N), dtype=complex)
    for (p, q, r, s), v in tensor.gamma_bar.items():
        # jump term: bar-gamma_{ac,bd} rho_cd  ->  (a,b) += v * rho[c,d]
        out[p, r] += v * rho[q, s]
        if p == r:
            K[s, q] += v
    out -= 0.5 * (K @ rho + rho @ K)
    return out


@dataclass(frozen=True)
class Generator:
    """Linear generator on a flattened state.

    ``kind`` is ``"quantum"`` (acting on vec(rho) restricted to ``index``) or
    ``"rate"`` (acting on the population vector).
    """

    matrix: np.ndarray | sp.spmatrix
    N: int
    kind: str
    index: np.ndarray | None = None

    @property
    def dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_scale(N: int, limit: int):
    if N > limit:
        raise ScaleExceededError(f"N={N} exceeds the oracle limit {limit}")


def build_quantum_generator(
    model: EnergyEigenbasisModel,
    bath: BathSpectrum,
    lam: float,
    include_lamb_shift: bool = False,
    sector: float | None = None,
) -> Generator:
    """Full quantum master equation (Hamiltonian, Lamb shift, dissipator).

    With ``sector`` set, only coherences rho_ab with E_a - E_b = sector are kept;
    the secular dynamics never mixes different sectors, so this is exact for
    initial states inside the sector (``sector=0.0`` holds all populations).
    """
    N = model.N
    _check_scale(N, MAX_FULL_N if sector is None else MAX_SECTOR_N)
    lam2 = lam * lam
    E = model.energies
    I = sp.identity(N, format="csr", dtype=complex)
    H = sp.diags(E.astype(complex), format="csr")
    K = sp.csr_matrix((N, N), dtype=complex)
    L = sp.csr_matrix((N * N, N * N), dtype=complex)
    for omega, Ak in bohr_decomposition(model):
        rate = bath.gamma(omega)
        AdA = (Ak.conj().T @ Ak).tocsr()
        if rate != 0.0:
            L = L + lam2 * rate * sp.kron(Ak, Ak.conj(), format="csr")
            K = K + lam2 * rate * AdA
        if include_lamb_shift:
            s = bath.sigma(omega)
            if s != 0:
                H = H + (lam2 / 2j) * s * AdA
    L = L - 1j * (sp.kron(H, I, format="csr") - sp.kron(I, H.T, format="csr"))
    L = L - 0.5 * (sp.kron(K, I, format="csr") + sp.kron(I, K.T, format="csr"))
    index = None
    if sector is not None:
        tol = model.energy_match_tolerance
        diff = (E[:, None] - E[None, :]).ravel()
        index = np.flatnonzero(np.abs(diff - sector) <= tol)
        L = L[index][:, index]
    L = L.tocsr()
    if sector is None and N <= DENSE_MAX_N:
        return Generator(L.toarray(), N, "quantum", None)
    return Generator(L, N, "quantum", index)


def build_rate_generator(
    model: EnergyEigenbasisModel, bath: BathSpectrum, lam: float
) -> Generator:
    """Population rate matrix R with R[a, b] the b -> a transition rate."""
    N = model.N
    _check_scale(N, MAX_SECTOR_N)
    R = np.zeros((N, N))
    for omega, Ak in bohr_decomposition(model):
        Ak = Ak.tocoo()
        off = Ak.row != Ak.col
        if not np.any(off):
            continue
        rate = bath.gamma(omega)
        np.add.at(R, (Ak.row[off], Ak.col[off]), lam * lam * rate * np.abs(Ak.data[off]) ** 2)
    R[np.diag_indices(N)] = -R.sum(axis=0)
    return Generator(R, N, "rate", None)


def dephasing_decay_rate(d_a: float, d_b: float, lam: float, gamma0: float) -> float:
    """Decay rate of rho_ab under a coupling that commutes with H (eigenvalues d_a, d_b)."""
    for x in (d_a, d_b, lam, gamma0):
        if not math.isfinite(x):
            raise ValueError("inputs must be finite")
    return lam * lam * gamma0 * (d_a - d_b) ** 2 / 2.0


# -- initial states -----------------------------------------------------------


def uniform_density(N: int) -> np.ndarray:
    """Diagonal, equal populations (infinite-temperature Gibbs state)."""
    return np.eye(N, dtype=complex) / N


def superposition_density(N: int) -> np.ndarray:
    """|s><s| for the equal superposition of all basis states."""
    return np.full((N, N), 1.0 / N, dtype=complex)


def top_shell_density(n: int, w: int = 0) -> np.ndarray:
    """Basis state at maximal Hamming distance from ``w``."""
    N = 1 << n
    rho = np.zeros((N, N), dtype=complex)
    top = w ^ (N - 1)
    rho[top, top] = 1.0
    return rho


# -- propagation --------------------------------------------------------------


class Method(str, enum.Enum):
    AUTO = "auto"
    EIG = "eig"
    EXPM = "expm"
    IVP = "ivp"


def _state_vector(gen: Generator, rho0: np.ndarray) -> np.ndarray:
    rho0 = np.asarray(rho0)
    N = gen.N
    if gen.kind == "rate":
        p = np.diag(rho0).real.copy() if rho0.ndim == 2 else rho0.astype(float).copy()
        if p.shape != (N,):
            raise ValueError(f"expected {N} populations")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError("populations must sum to 1")
        return p
    if rho0.shape != (N, N):
        raise ValueError(f"expected an {N}x{N} density matrix")
    if not np.allclose(rho0, rho0.conj().T, atol=1e-12):
        raise ValueError("density matrix must be hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    v = rho0.astype(complex).ravel()
    if gen.index is None:
        return v
    outside = np.ones(v.size, dtype=bool)
    outside[gen.index] = False
    if np.any(np.abs(v[outside]) > 0):
        raise ValueError("initial state has weight outside the generator's sector")
    return v[gen.index]


def _unpack(gen: Generator, vs: np.ndarray) -> np.ndarray:
    if gen.kind == "rate":
        return vs.real
    T = vs.shape[0]
    N = gen.N
    full = np.zeros((T, N * N), dtype=complex)
    if gen.index is None:
        full[:] = vs
    else:
        full[:, gen.index] = vs
    return full.reshape(T, N, N)


def _propagate_eig(L: np.ndarray, v0: np.ndarray, times: np.ndarray):
    w, V = np.linalg.eig(L)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond >= EIG_COND_LIMIT:
        return None
    c = np.linalg.solve(V, v0.astype(complex))
    out = (V @ (np.exp(np.outer(w, times)) * c[:, None])).T
    return out


def _propagate_expm(L, v0: np.ndarray, times: np.ndarray) -> np.ndarray:
    out = np.empty((times.size, v0.size), dtype=complex)
    v = v0.astype(complex)
    t_prev = 0.0
    for i, t in enumerate(times):
        dt = t - t_prev
        if dt != 0.0:
            if sp.issparse(L):
                v = expm_multiply(L * dt, v)
            else:
                v = scipy.linalg.expm(L * dt) @ v
        out[i] = v
        t_prev = t
    return out


def _propagate_ivp(L, v0: np.ndarray, times: np.ndarray) -> np.ndarray:
    sol = solve_ivp(
        lambda t, y: L @ y,
        (0.0, float(times[-1])),
        v0.astype(complex),
        method="BDF",
        t_eval=times,
        jac=L,
        rtol=1e-10,
        atol=1e-13,
    )
    if not sol.success:
        raise NumericalError(f"integration failed: {sol.message}")
    return sol.y.T


def evolve(
    gen: Generator,
    rho0: np.ndarray,
    times,
    method: Method | str = Method.AUTO,
) -> Trajectory:
    """Propagate a density matrix (quantum) or population vector (rate).

    ``auto`` uses the eigendecomposition when the eigenvector matrix has
    condition number below 1e8, otherwise an exact matrix exponential
    (dense ``expm`` or sparse ``expm_multiply``).  ``ivp`` integrates
    adaptively (BDF, rtol 1e-10).
    """
    method = Method(method)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-decreasing grid of t >= 0")
    v0 = _state_vector(gen, rho0)
    L = gen.matrix
    out = None
    if method in (Method.AUTO, Method.EIG) and gen.dense:
        out = _propagate_eig(L, v0, times)
        if out is None and method is Method.EIG:
            raise NumericalError("generator eigenvectors are too ill-conditioned")
    elif method is Method.EIG:
        raise NumericalError("eigendecomposition needs a dense generator")
    if out is None:
        if method is Method.IVP:
            out = _propagate_ivp(L, v0, times)
        else:
            out = _propagate_expm(L, v0, times)
    values = _unpack(gen, np.asarray(out))
    return Trajectory(times, values, meta={"kind": gen.kind, "method": method.value})


# -- reduced variables --------------------------------------------------------


class VariableSet(str, enum.Enum):
    RATE = "rate"  # rho_ww, sum of other populations
    QUANTUM = "quantum"  # rho_ww, sum over a,b != w of rho_ab
    HADAMARD = "hadamard"  # rho_ww, signed sum over a,b != w
    SHELL_POPULATIONS = "shell_populations"
    SHELL_COHERENT = "shell_coherent"


def _as_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim == 1:
        return np.diag(rho)
    if rho.ndim == 2 and rho.shape[0] != rho.shape[1]:
        return np.stack([np.diag(r) for r in rho])
    return rho


def project_reduced(rho: np.ndarray, variable_set: VariableSet | str, w: int, n: int) -> np.ndarray:
    """Reduced variables of one density matrix (N x N), a stack (T x N x N),
    or population vectors (N or T x N)."""
    vs = VariableSet(variable_set)
    rho = _as_density(rho)
    single = rho.ndim == 2
    R = rho[None] if single else rho
    N = 1 << n
    if R.shape[1:] != (N, N):
        raise ValueError(f"expected {N}x{N} matrices")
    if vs in (VariableSet.RATE, VariableSet.QUANTUM, VariableSet.HADAMARD):
        mask = np.ones(N, dtype=bool)
        mask[w] = False
        z1 = R[:, w, w]
        if vs is VariableSet.RATE:
            z2 = np.einsum("taa->t", R[:, mask][:, :, mask])
        else:
            if vs is VariableSet.HADAMARD:
                # (-1)^{w o a}: parity of the bitwise AND with the solution
                s = 1.0 - 2.0 * (hamming_shells(n, 0)[np.arange(N) & w] % 2)
            else:
                s = np.ones(N)
            s = s[mask]
            z2 = np.einsum("a,tab,b->t", s, R[:, mask][:, :, mask], s)
        out = np.stack([z1, z2], axis=1)
    else:
        shells = hamming_shells(n, w)
        onehot = (shells[None, :] == np.arange(n + 1)[:, None]).astype(float)
        if vs is VariableSet.SHELL_POPULATIONS:
            diag = np.einsum("taa->ta", R)
            out = diag @ onehot.T
        else:
            out = np.einsum("ka,tab,kb->tk", onehot, R, onehot)
    out = out.real
    return out[0] if single else out
