"""System Hamiltonians and coupling operators.

States are integers whose binary expansion is the qubit configuration, least
significant bit = qubit 1.  A bitstring ``"0110"`` is read as a binary number,
so its rightmost character is qubit 1.  All Hamiltonians here are diagonal in
the computational basis, so that basis is also the energy eigenbasis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp


class CouplingKind(str, enum.Enum):
    PROJECTOR = "projector"
    INDIRECT = "indirect"
    DIRECT = "direct"
    HADAMARD = "hadamard"
    COLLECTIVE_BITFLIP = "collective_bitflip"


NONLOCAL_KINDS = (
    CouplingKind.PROJECTOR,
    CouplingKind.INDIRECT,
    CouplingKind.DIRECT,
    CouplingKind.HADAMARD,
)


def eta(kind: CouplingKind | str, size: int) -> float:
    """Norm factor of a coupling operator.

    ``size`` is the state count N for the nonlocal kinds and the qubit count n
    for ``collective_bitflip``.
    """
    kind = CouplingKind(kind)
    if size < 1:
        raise ValueError("size must be >= 1")
    if kind in (CouplingKind.PROJECTOR, CouplingKind.HADAMARD):
        return 1.0
    if kind is CouplingKind.INDIRECT:
        return size / (size + 1.0)
    if kind is CouplingKind.DIRECT:
        root = math.sqrt(size)
        return root / (1.0 + root)
    return 1.0 / size


def popcount(x: int) -> int:
    return bin(x).count("1")


def parse_bitstring(bits: str) -> int:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def hamming_distance(a: str | int, b: str | int) -> int:
    """Number of bit flips turning ``a`` into ``b``.

    Bitstrings must have equal length; plain integers are compared directly.
    """
    if isinstance(a, str) or isinstance(b, str):
        if not (isinstance(a, str) and isinstance(b, str)):
            raise TypeError("compare two bitstrings or two integers")
        if len(a) != len(b):
            raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
        return popcount(parse_bitstring(a) ^ parse_bitstring(b))
    return popcount(int(a) ^ int(b))


def shell_degeneracy(n: int, alpha: int) -> int:
    """Exact number of n-bit states at Hamming distance alpha from a fixed state."""
    if not 0 <= alpha <= n:
        raise ValueError(f"alpha={alpha} outside [0, {n}]")
    return math.comb(n, alpha)


def log_shell_degeneracy(n: int, alpha=None) -> np.ndarray:
    """log binom(n, alpha) for alpha = 0..n (or the given alphas)."""
    alpha = np.arange(n + 1) if alpha is None else np.asarray(alpha)
    return gammaln(n + 1.0) - gammaln(alpha + 1.0) - gammaln(n - alpha + 1.0)


def matrix_element(kind: CouplingKind | str, a: int, b: int, n: int, w: int = 0) -> float:
    """<a|A|b> in the computational basis, norm factor included."""
    kind = CouplingKind(kind)
    N = 1 << n
    if not (0 <= a < N and 0 <= b < N):
        raise ValueError("state index out of range")
    if kind is CouplingKind.PROJECTOR:
        return 1.0 / N
    if kind is CouplingKind.INDIRECT:
        return eta(kind, N) * (1.0 / N + (1.0 if a == w and b == w else 0.0))
    if kind is CouplingKind.DIRECT:
        s = 1.0 / math.sqrt(N)
        return eta(kind, N) * (s * (b == w) + s * (a == w))
    if kind is CouplingKind.HADAMARD:
        return (-1.0) ** popcount(a & b) / math.sqrt(N)
    return eta(kind, n) if popcount(a ^ b) == 1 else 0.0


def coupling_matrix(kind: CouplingKind | str, n: int, w: int = 0) -> np.ndarray:
    """Full N x N real symmetric coupling operator, built vectorised."""
    kind = CouplingKind(kind)
    N = 1 << n
    idx = np.arange(N)
    if kind is CouplingKind.PROJECTOR:
        return np.full((N, N), 1.0 / N)
    if kind is CouplingKind.INDIRECT:
        A = np.full((N, N), 1.0 / N)
        A[w, w] += 1.0
        return eta(kind, N) * A
    if kind is CouplingKind.DIRECT:
        A = np.zeros((N, N))
        A[w, :] += 1.0 / math.sqrt(N)
        A[:, w] += 1.0 / math.sqrt(N)
        return eta(kind, N) * A
    if kind is CouplingKind.HADAMARD:
        bits = np.bitwise_and.outer(idx, idx)
        parity = np.zeros_like(bits)
        for k in range(n):
            parity ^= (bits >> k) & 1
        return (1.0 - 2.0 * parity) / math.sqrt(N)
    xor = np.bitwise_xor.outer(idx, idx)
    single = (xor != 0) & ((xor & (xor - 1)) == 0)
    return np.where(single, eta(kind, n), 0.0)


def hamming_shells(n: int, w: int = 0) -> np.ndarray:
    """Hamming distance of every basis state to ``w``."""
    idx = np.arange(1 << n)
    x = idx ^ w
    out = np.zeros_like(x)
    for k in range(n):
        out += (x >> k) & 1
    return out


@dataclass(frozen=True)
class OracleModel:
    """H = delta_e (1 - |w><w|): unique ground state w, N-1 degenerate excited states."""

    n: int
    delta_e: float = 1.0
    w: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.delta_e > 0:
            raise ValueError("delta_e must be > 0")
        if not 0 <= self.w < self.N:
            raise ValueError(f"solution index {self.w} outside [0, {self.N})")

    @property
    def N(self) -> int:
        return 1 << self.n

    def energies(self) -> np.ndarray:
        E = np.full(self.N, self.delta_e)
        E[self.w] = 0.0
        return E

    def levels(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct energies and their degeneracies."""
        return np.array([0.0, self.delta_e]), np.array([1.0, self.N - 1.0])

    def coupling(self, kind: CouplingKind | str) -> np.ndarray:
        return coupling_matrix(kind, self.n, self.w)


@dataclass(frozen=True)
class LadderModel:
    """Energy E_alpha for every state at Hamming distance alpha from the solution."""

    n: int
    energies: tuple[float, ...]
    w: int = 0

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.energies) != self.n + 1:
            raise ValueError(f"need {self.n + 1} shell energies, got {len(self.energies)}")
        if any(b < a for a, b in zip(self.energies, self.energies[1:])):
            raise ValueError("shell energies must be non-decreasing")
        if not 0 <= self.w < (1 << self.n):
            raise ValueError("solution index out of range")

    @classmethod
    def equidistant(cls, n: int, delta_e: float = 1.0, w: int = 0) -> "LadderModel":
        return cls(n, tuple(alpha * delta_e for alpha in range(n + 1)), w)

    @property
    def N(self) -> int:
        return 1 << self.n

    def spacing(self) -> float | None:
        """Common level spacing, or None when the ladder is not equidistant."""
        E = np.asarray(self.energies)
        d = np.diff(E)
        if np.allclose(d, d[0], rtol=1e-12, atol=1e-12 * max(1.0, abs(d[0]))):
            return float(d[0])
        return None

    def log_degeneracies(self) -> np.ndarray:
        return log_shell_degeneracy(self.n)

    def state_energies(self) -> np.ndarray:
        return np.asarray(self.energies)[hamming_shells(self.n, self.w)]

    def coupling(self, kind: CouplingKind | str = CouplingKind.COLLECTIVE_BITFLIP) -> np.ndarray:
        return coupling_matrix(kind, self.n, self.w)


@dataclass(frozen=True)
class DickeModel:
    """n two-level emitters with splitting omega0, as a Hamming ladder."""

    n: int
    omega0: float = 1.0

    def __post_init__(self):
        if self.n < 1 or not self.omega0 > 0:
            raise ValueError("need n >= 1 and omega0 > 0")

    def as_ladder(self) -> LadderModel:
        return LadderModel(
            self.n, tuple(self.omega0 * (alpha - self.n / 2) for alpha in range(self.n + 1))
        )


def gibbs_ground_probability(
    energies: Sequence[float],
    beta: float,
    degeneracies: Sequence[float] | None = None,
    log_degeneracies: Sequence[float] | None = None,
) -> float:
    """Thermal population of the first (unique, lowest) level.

    ``energies`` may list every state, or distinct levels together with their
    degeneracies (plain or logarithmic).  The first level must be non-degenerate.
    """
    E = np.asarray(energies, dtype=float)
    if E.size == 0:
        raise ValueError("empty spectrum")
    if log_degeneracies is not None:
        logg = np.asarray(log_degeneracies, dtype=float)
    elif degeneracies is not None:
        logg = np.log(np.asarray(degeneracies, dtype=float))
    else:
        logg = np.zeros_like(E)
    if beta < 0 or math.isnan(beta):
        raise ValueError("beta must be >= 0")
    if math.isinf(beta):
        E0 = E[0]
        if np.any(E[1:] <= E0) or logg[0] != 0.0:
            raise ValueError("zero-temperature ground probability needs a unique ground state")
        return 1.0
    x = logg - beta * (E - E[0])
    return float(math.exp(x[0] - logsumexp(x)))
