"""Truncated Fock-space states and operators for the displaced oscillator.

States are plain complex numpy vectors of length ``N`` and operators are
dense ``N x N`` complex arrays; level ``n`` is index ``n``.  Operator
exponentials go through the Hermitian eigendecomposition so that the
resulting propagators are unitary to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, TruncationError

EDGE_LEVELS = 5


@dataclass(frozen=True)
class OscillatorParams:
    """Physical constants of ``H = omega a^dag a + lambda_ (a + a^dag)``.

    ``gamma`` is the intrinsic decoherence rate; a very large finite value
    (e.g. ``1e12``) stands in for the unitary limit.
    """

    omega: float
    lambda_: float
    gamma: float

    def __post_init__(self):
        for name in ("omega", "lambda_", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def beta(self) -> float:
        """Displacement ``lambda_/omega`` that diagonalises ``H``."""
        return self.lambda_ / self.omega

    @property
    def ground_shift(self) -> float:
        """Energy offset ``-lambda_**2/omega`` of the displaced spectrum."""
        return -self.lambda_**2 / self.omega


@dataclass(frozen=True)
class TruncationPolicy:
    fock_cutoff: int = 96
    edge_tolerance: float = 1e-10
    poisson_tail_tol: float = 1e-12

    def __post_init__(self):
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 2:
            raise ValueError("fock_cutoff must be an integer >= 2")
        if not (math.isfinite(self.edge_tolerance) and self.edge_tolerance >= 0):
            raise ValueError("edge_tolerance must be finite and >= 0")
        if not (math.isfinite(self.poisson_tail_tol) and self.poisson_tail_tol > 0):
            raise ValueError("poisson_tail_tol must be finite and > 0")

    @property
    def dim(self) -> int:
        return int(self.fock_cutoff)


@dataclass(frozen=True)
class SqueezeParameter:
    """Complex squeeze amplitude ``z = r exp(i theta)``."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0):
            raise ValueError("r must be finite and >= 0")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        theta = self.theta % (2 * math.pi)
        # tiny negative angles round up to exactly 2 pi
        object.__setattr__(self, "theta", 0.0 if theta == 2 * math.pi else theta)

    @property
    def z(self) -> complex:
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def mu(self) -> float:
        return math.cosh(self.r)

    @property
    def nu(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta)) * math.sinh(self.r)


@dataclass(frozen=True)
class SpectralDecomposition:
    """``H = V diag(E) V^dag`` with ascending eigenvalues ``E``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, func) -> np.ndarray:
        """Return ``V diag(func(E)) V^dag``."""
        V = self.eigenvectors
        return (V * func(self.eigenvalues)) @ V.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda e: e)


def make_annihilation(policy: TruncationPolicy) -> np.ndarray:
    n = policy.dim
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def make_creation(policy: TruncationPolicy) -> np.ndarray:
    return make_annihilation(policy).conj().T


def make_number(policy: TruncationPolicy) -> np.ndarray:
    return np.diag(np.arange(policy.dim, dtype=float)).astype(complex)


def make_quadrature(policy: TruncationPolicy) -> np.ndarray:
    """Twice the position quadrature, ``a + a^dag``."""
    a = make_annihilation(policy)
    return a + a.conj().T


def make_hamiltonian(params: OscillatorParams, policy: TruncationPolicy) -> np.ndarray:
    """Tridiagonal ``omega n`` on the diagonal, ``lambda_ sqrt(n+1)`` off it."""
    return params.omega * make_number(policy) + params.lambda_ * make_quadrature(policy)


def observable(name: str, policy: TruncationPolicy) -> np.ndarray:
    if name == "quadrature":
        return make_quadrature(policy)
    if name == "number":
        return make_number(policy)
    raise ValueError(f"unknown observable {name!r}; expected 'quadrature' or 'number'")


def hermitian_eig(H: np.ndarray, atol: float = 1e-10) -> SpectralDecomposition:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H - H.conj().T).max(initial=0.0) > atol * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    E, V = np.linalg.eigh(H)
    return SpectralDecomposition(E, V)


def expm_antihermitian(G: np.ndarray) -> np.ndarray:
    """``exp(G)`` for anti-Hermitian ``G`` via the spectrum of ``iG``."""
    spectral = hermitian_eig(1j * G)
    return spectral.apply(lambda e: np.exp(-1j * e))


def displacement_operator(beta: complex, policy: TruncationPolicy) -> np.ndarray:
    """``D(beta) = exp(beta a^dag - beta^* a)`` on the truncated basis."""
    a = make_annihilation(policy)
    return expm_antihermitian(beta * a.conj().T - np.conj(beta) * a)


def squeeze_operator(z: SqueezeParameter, policy: TruncationPolicy) -> np.ndarray:
    """``S(z) = exp((z^* a^2 - z a^dag^2)/2)``.

    With this sign convention ``S^dag a S = mu a - nu a^dag``.
    """
    a = make_annihilation(policy)
    ad = a.conj().T
    zc = z.z
    return expm_antihermitian(0.5 * (np.conj(zc) * (a @ a) - zc * (ad @ ad)))


def edge_population(state: np.ndarray, levels: int = EDGE_LEVELS) -> float:
    """Total population in the top ``levels`` Fock levels."""
    state = np.asarray(state)
    if state.ndim == 2:
        return float(np.real(np.trace(state[-levels:, -levels:])))
    return float(np.sum(np.abs(state[-levels:]) ** 2))


def check_truncation(state: np.ndarray, policy: TruncationPolicy, what: str = "state") -> None:
    if policy.edge_tolerance == 0:
        return
    pop = edge_population(state)
    if pop > policy.edge_tolerance:
        raise TruncationError(
            f"{what}: population {pop:.3e} in the top {EDGE_LEVELS} of {policy.dim} "
            f"levels exceeds edge_tolerance {policy.edge_tolerance:.1e}; raise fock_cutoff"
        )


def _normalized(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def fock_state(n: int, policy: TruncationPolicy) -> np.ndarray:
    if not 0 <= n < policy.dim:
        raise ValueError(f"level {n} outside truncated basis of size {policy.dim}")
    v = np.zeros(policy.dim, dtype=complex)
    v[n] = 1.0
    check_truncation(v, policy, what=f"fock state |{n}>")
    return v


def coherent_state(alpha: complex, policy: TruncationPolicy) -> np.ndarray:
    # multiplicative recurrence, no factorials
    c = np.empty(policy.dim, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(policy.dim - 1):
        c[n + 1] = c[n] * alpha / math.sqrt(n + 1)
    c = _normalized(c)
    check_truncation(c, policy, what=f"coherent state alpha={alpha}")
    return c


def squeezed_state(alpha: complex, z: SqueezeParameter, policy: TruncationPolicy) -> np.ndarray:
    """``S(z)|alpha>`` (squeeze applied after the displacement)."""
    v = _normalized(squeeze_operator(z, policy) @ coherent_state(alpha, policy))
    check_truncation(v, policy, what=f"squeezed state alpha={alpha}, r={z.r}, theta={z.theta}")
    return v


def expectation(state: np.ndarray, op: np.ndarray) -> complex:
    """``<psi|O|psi>`` for a vector, ``tr(rho O)`` for a density matrix."""
    state = np.asarray(state)
    op = np.asarray(op)
    n = op.shape[0]
    if op.shape != (n, n) or state.shape[0] != n or (state.ndim == 2 and state.shape != (n, n)):
        raise DimensionMismatch(f"state shape {state.shape} vs operator shape {op.shape}")
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.einsum("ij,ji->", state, op))
