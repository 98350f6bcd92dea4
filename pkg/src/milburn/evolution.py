"""Numerical evolution under the intrinsic-decoherence map.

The exact solution is a Poisson mixture of pure branches,

    rho(t) = sum_k  e^{-gamma t} (gamma t)^k / k!  |psi_k><psi_k|,
    |psi_k> = exp(-i k H / gamma) |psi(0)>,

evaluated here along two independent routes (repeated application of the
one-kick propagator, and the displaced frame where the kick is a diagonal
phase).  ``integrate_lindblad`` integrates the second-order truncation
of the generator for comparison.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import DimensionMismatch, PlanOverflow, StepSizeUnderflow, UnknownMethod
from .fock import OscillatorParams, SpectralDecomposition, TruncationPolicy

log = logging.getLogger(__name__)

METHODS = ("series", "displaced_frame", "lindblad", "closed_form")
DEFAULT_MAX_TERMS = 1_000_000
# exact second-order expansion of gamma (U rho U^dag - rho) in 1/gamma
TAYLOR_WEIGHT = 0.5
_FLUSH = 1e-250


@dataclass(frozen=True)
class MilburnKernel:
    unitary: np.ndarray
    spectral: SpectralDecomposition
    hamiltonian: np.ndarray
    params: OscillatorParams
    policy: TruncationPolicy


@dataclass(frozen=True)
class SeriesPlan:
    t: float
    k_max: int
    weights: np.ndarray
    tail_mass: float


@dataclass
class TimeSeries:
    """Expectation tracks on a shared time grid, keyed by ``(observable, method)``."""

    times: np.ndarray
    tracks: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)

    def add(self, observable: str, method: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != self.times.shape:
            raise DimensionMismatch(
                f"track {observable}.{method} has shape {values.shape}, grid has {self.times.shape}"
            )
        self.tracks[(observable, method)] = values

    def __getitem__(self, key) -> np.ndarray:
        return self.tracks[key]


def build_kernel(params: OscillatorParams, policy: TruncationPolicy) -> MilburnKernel:
    H = fock.make_hamiltonian(params, policy)
    spectral = fock.hermitian_eig(H)
    U = spectral.apply(lambda e: np.exp(-1j * e / params.gamma))
    return MilburnKernel(U, spectral, H, params, policy)


def _log_poisson(mean: float, k_hi: int) -> np.ndarray:
    log_mean = math.log(mean)
    return np.array([k * log_mean - mean - math.lgamma(k + 1.0) for k in range(k_hi + 1)])


def poisson_weights(mean: float, k_hi: int) -> np.ndarray:
    """Poisson(mean) probabilities for ``k = 0..k_hi``."""
    if mean == 0:
        w = np.zeros(k_hi + 1)
        w[0] = 1.0
        return w
    if mean > 700:
        # e^{-mean} underflows; go through log space.  The log terms carry an
        # error of order mean * eps, so renormalize over the window, which holds
        # everything but < 1e-300 of the mass when k_hi is past the far tail.
        w = np.exp(_log_poisson(mean, k_hi))
        if k_hi >= mean + 40.0 * math.sqrt(mean):
            w /= math.fsum(w)
        return w
    w = np.empty(k_hi + 1)
    w[0] = math.exp(-mean)
    for k in range(k_hi):
        w[k + 1] = w[k] * mean / (k + 1)
    return w


def plan_series(
    params: OscillatorParams,
    policy: TruncationPolicy,
    t: float,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SeriesPlan:
    """Poisson weights for time ``t``, truncated once the dropped tail is below tolerance.

    The tail is the direct sum of the dropped weights (computed far enough
    out that the remainder is below double precision), not a bound.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    mean = params.gamma * t
    if mean == 0:
        return SeriesPlan(float(t), 0, np.ones(1), 0.0)
    # weights beyond mean + 40 sqrt(mean) + 60 are far below 1e-300
    k_hi = int(math.ceil(mean + 40.0 * math.sqrt(mean) + 60.0))
    if k_hi > 4 * max_terms + 1000:
        raise PlanOverflow(f"gamma*t = {mean:.3g} needs more than {max_terms} series terms")
    w = poisson_weights(mean, k_hi)
    # tails[k] = sum of weights with index > k
    tails = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]])
    k_max = int(np.argmax(tails <= policy.poisson_tail_tol))
    if k_max > max_terms:
        raise PlanOverflow(f"gamma*t = {mean:.3g} needs {k_max} series terms (ceiling {max_terms})")
    return SeriesPlan(float(t), k_max, w[: k_max + 1].copy(), float(tails[k_max]))


def _check_dims(initial: np.ndarray, observables: Sequence[np.ndarray], n: int) -> None:
    if initial.shape != (n,):
        raise DimensionMismatch(f"initial state has shape {initial.shape}, expected ({n},)")
    for op in observables:
        if np.shape(op) != (n, n):
            raise DimensionMismatch(f"observable has shape {np.shape(op)}, expected ({n}, {n})")


def _branch_values(psis: np.ndarray, observables: Sequence[np.ndarray]) -> np.ndarray:
    """``<psi_k|O_j|psi_k>`` for the rows of ``psis``, shape ``(K, len(observables))``."""
    out = np.empty((psis.shape[0], len(observables)))
    for j, op in enumerate(observables):
        out[:, j] = np.einsum("kn,kn->k", psis.conj(), psis @ np.asarray(op).T).real
    return out


def series_branches(initial: np.ndarray, kernel: MilburnKernel, k_max: int) -> np.ndarray:
    """Rows ``psi_0 .. psi_{k_max}`` with ``psi_{k+1} = U psi_k``."""
    psis = np.empty((k_max + 1, initial.shape[0]), dtype=complex)
    psis[0] = initial
    for k in range(k_max):
        psis[k + 1] = kernel.unitary @ psis[k]
    return psis


def displaced_frame_branches(
    initial: np.ndarray, params: OscillatorParams, policy: TruncationPolicy, k_max: int
) -> np.ndarray:
    """Same branches as :func:`series_branches`, built as ``D^dag exp(-i k omega n/gamma) D psi(0)``.

    The global phase ``exp(i k lambda^2/(gamma omega))`` is dropped; it
    cancels in every ``|psi_k><psi_k|``.
    """
    D = fock.displacement_operator(params.beta, policy)
    shifted = D @ initial
    n = np.arange(policy.dim)
    k = np.arange(k_max + 1)[:, None]
    rotated = np.exp(-1j * (params.omega / params.gamma) * k * n) * shifted
    # row k -> D^dag rotated[k]
    return rotated @ D.conj()


def evolve_series(
    initial: np.ndarray,
    kernel: MilburnKernel,
    plan: SeriesPlan,
    observables: Sequence[np.ndarray],
    return_density: bool = False,
):
    """Expectation values at ``plan.t`` by the Poisson-weighted branch sum.

    Returns an array with one real value per observable (the imaginary part
    is roundoff for Hermitian observables and is dropped).  With
    ``return_density=True`` also returns the accumulated density matrix.
    """
    initial = np.asarray(initial, dtype=complex)
    _check_dims(initial, observables, kernel.policy.dim)
    psis = series_branches(initial, kernel, plan.k_max)
    values = plan.weights @ _branch_values(psis, observables)
    if return_density:
        rho = (psis.T * plan.weights) @ psis.conj()
        return values, rho
    return values


def evolve_series_displaced_frame(
    initial: np.ndarray,
    params: OscillatorParams,
    policy: TruncationPolicy,
    plan: SeriesPlan,
    observables: Sequence[np.ndarray],
) -> np.ndarray:
    initial = np.asarray(initial, dtype=complex)
    _check_dims(initial, observables, policy.dim)
    psis = displaced_frame_branches(initial, params, policy, plan.k_max)
    return plan.weights @ _branch_values(psis, observables)


def lindblad_rhs(
    rho: np.ndarray, H: np.ndarray, gamma: float, weight: float = TAYLOR_WEIGHT
) -> np.ndarray:
    """``-i[H, rho] - (weight/gamma) [H, [H, rho]]``.

    ``weight=0.5`` is the second-order expansion of the full map;
    ``weight=1.0`` doubles the dephasing term and is only first-order accurate.
    """
    rho = np.asarray(rho)
    H = np.asarray(H)
    if rho.shape != H.shape or rho.ndim != 2:
        raise DimensionMismatch(f"rho shape {rho.shape} vs H shape {H.shape}")
    c1 = H @ rho - rho @ H
    c2 = H @ c1 - c1 @ H
    return -1j * c1 - (weight / gamma) * c2


def _rk4_step(y, h, rhs):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def lindblad_step_size(params: OscillatorParams, spectral: SpectralDecomposition) -> float:
    """Largest RK4 step: ``min(0.01/omega, 0.1 gamma/spread^2, 1/spread)``."""
    spread = float(spectral.eigenvalues[-1] - spectral.eigenvalues[0])
    h = 0.01 / params.omega
    if spread > 0:
        h = min(h, 0.1 * params.gamma / spread**2)
    if spread > 0:
        # keep the unitary part inside the RK4 stability region
        h = min(h, 1.0 / spread)
    return h


def integrate_lindblad(
    initial: np.ndarray,
    params: OscillatorParams,
    policy: TruncationPolicy,
    t_grid,
    observables: Mapping[str, np.ndarray],
    weight: float = TAYLOR_WEIGHT,
    max_step: float | None = None,
) -> TimeSeries:
    """Fixed-step RK4 integration of :func:`lindblad_rhs`.

    The state is propagated in the eigenbasis of ``H`` where both commutators
    reduce to elementwise products; the step is the same RK4 step as in the
    Fock basis, only cheaper.  ``initial`` may be a vector or a density matrix.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly ascending and start at 0")
    rho0 = np.asarray(initial, dtype=complex)
    if rho0.ndim == 1:
        rho0 = np.outer(rho0, rho0.conj())
    n = policy.dim
    if rho0.shape != (n, n):
        raise DimensionMismatch(f"initial state shape {rho0.shape} vs basis size {n}")

    spectral = fock.hermitian_eig(fock.make_hamiltonian(params, policy))
    V = spectral.eigenvectors
    E = spectral.eigenvalues
    gap = E[:, None] - E[None, :]
    generator = -1j * gap - (weight / params.gamma) * gap**2

    def rhs(r):
        return generator * r

    h_max = lindblad_step_size(params, spectral)
    if max_step is not None:
        h_max = min(h_max, max_step)
    if h_max < 1e-9:
        raise StepSizeUnderflow(f"required step {h_max:.2e} is below 1e-9")

    names = list(observables)
    ops_eig = [V.conj().T @ np.asarray(observables[name]) @ V for name in names]
    values = np.empty((t_grid.size, len(names)))
    rho = V.conj().T @ rho0 @ V
    max_drift = 0.0
    n_steps = 0
    for i, t in enumerate(t_grid):
        if i > 0:
            dt = t - t_grid[i - 1]
            steps = max(1, math.ceil(dt / h_max - 1e-12))
            h = dt / steps
            for step in range(steps):
                rho = _rk4_step(rho, h, rhs)
                if step % 256 == 255:
                    # decayed coherences drift into subnormals, which are very slow
                    rho[np.abs(rho) < _FLUSH] = 0.0
            n_steps += steps
            tr = np.trace(rho).real
            drift = abs(tr - 1.0)
            max_drift = max(max_drift, drift)
            if drift > 1e-9:
                rho = rho / tr
        for j, op in enumerate(ops_eig):
            values[i, j] = np.einsum("ij,ji->", rho, op).real

    series = TimeSeries(t_grid)
    for j, name in enumerate(names):
        series.add(name, "lindblad", values[:, j])
    series.diagnostics.update(lindblad_step=h_max, lindblad_steps=n_steps, trace_drift=max_drift)
    return series


def run_timeseries(
    initial,
    params: OscillatorParams,
    policy: TruncationPolicy,
    t_grid,
    observables: Sequence[str] = ("quadrature", "number"),
    methods: Sequence[str] = ("series",),
    max_terms: int = DEFAULT_MAX_TERMS,
) -> TimeSeries:
    """One track per ``(observable, method)`` on ``t_grid``.

    ``initial`` is a state descriptor from :mod:`milburn.states` or a raw Fock
    vector; the ``closed_form`` method needs a coherent or squeezed descriptor.
    Branch chains are built once up to the largest ``k_max`` of the grid and
    reused for every time point, each with its own Poisson plan.
    """
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise UnknownMethod(f"unknown method(s) {unknown}; expected a subset of {METHODS}")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly ascending and non-negative")

    spec = None if isinstance(initial, np.ndarray) else initial
    psi0 = initial if spec is None else spec.prepare(policy)
    psi0 = np.asarray(psi0, dtype=complex)
    ops = [fock.observable(name, policy) for name in observables]
    _check_dims(psi0, ops, policy.dim)

    series = TimeSeries(t_grid)
    series.diagnostics["initial_edge_population"] = fock.edge_population(psi0)

    plans = None
    if "series" in methods or "displaced_frame" in methods:
        plans = [plan_series(params, policy, t, max_terms) for t in t_grid]
        k_top = max(p.k_max for p in plans)
        series.diagnostics["max_tail_mass"] = max(p.tail_mass for p in plans)
        series.diagnostics["max_terms"] = k_top

    for method in methods:
        if method in ("series", "displaced_frame"):
            if method == "series":
                psis = series_branches(psi0, build_kernel(params, policy), k_top)
            else:
                psis = displaced_frame_branches(psi0, params, policy, k_top)
            table = _branch_values(psis, ops)
            edge = np.sum(np.abs(psis[:, -fock.EDGE_LEVELS:]) ** 2, axis=1).max()
            series.diagnostics[f"{method}_max_edge_population"] = float(edge)
            vals = np.array([p.weights @ table[: p.k_max + 1] for p in plans])
            for j, name in enumerate(observables):
                series.add(name, method, vals[:, j])
        elif method == "lindblad":
            if t_grid[0] != 0:
                raise ValueError("lindblad method needs a grid starting at t = 0")
            lind = integrate_lindblad(psi0, params, policy, t_grid, dict(zip(observables, ops)))
            series.tracks.update(lind.tracks)
            series.diagnostics.update(lind.diagnostics)
        elif method == "closed_form":
            if spec is None or not spec.has_closed_form:
                raise ValueError("closed_form needs a coherent or squeezed initial-state descriptor")
            for name in observables:
                series.add(name, "closed_form", spec.closed_form(name, params, t_grid))
    return series
