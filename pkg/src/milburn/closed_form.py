"""Exact expectation values under the full intrinsic-decoherence map.

Every branch ``k`` of the Poisson mixture rotates the displaced-frame
amplitude by ``exp(-i k omega/gamma)``; summing the Poisson weights turns
those phases into the two kernels

    plus  = exp(-gamma t (1 - exp(+i omega/gamma)))
    minus = exp(-gamma t (1 - exp(-i omega/gamma)))

and every first moment below is a linear combination of them.  All
functions accept scalar or array ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import OscillatorParams, SqueezeParameter

_IMAG_TOL = 1e-12


@dataclass(frozen=True)
class DecayKernel:
    plus: np.ndarray | complex
    minus: np.ndarray | complex


@dataclass(frozen=True)
class ClosedFormResult:
    """``value = 2 Re(oscillating_part) + constant_part``."""

    value: np.ndarray | float
    oscillating_part: np.ndarray | complex
    constant_part: float


def _one_minus_phase(x: float) -> complex:
    # 1 - exp(ix) = 2 sin^2(x/2) - i sin(x); no cancellation for tiny x
    return complex(2.0 * np.sin(0.5 * x) ** 2, -np.sin(x))


def envelope_rate(params: OscillatorParams) -> float:
    """Decay rate ``gamma (1 - cos(omega/gamma))`` of the oscillation envelope."""
    return float(2.0 * params.gamma * np.sin(0.5 * params.omega / params.gamma) ** 2)


def oscillation_frequency(params: OscillatorParams) -> float:
    """Angular frequency ``gamma sin(omega/gamma)`` of the damped oscillation."""
    return float(params.gamma * np.sin(params.omega / params.gamma))


def decay_kernel(params: OscillatorParams, t) -> DecayKernel:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    exponent = -params.gamma * t * _one_minus_phase(params.omega / params.gamma)
    plus = np.exp(exponent)
    minus = np.conj(plus)
    if plus.ndim == 0:
        return DecayKernel(complex(plus), complex(minus))
    return DecayKernel(plus, minus)


def _real(z, scale):
    z = np.asarray(z)
    resid = np.max(np.abs(z.imag), initial=0.0)
    if resid > _IMAG_TOL * max(1.0, scale):
        raise ValueError(
            f"closed-form sum has imaginary residue {resid:.2e}; "
            "are mean_adag and mean_a complex conjugates?"
        )
    z = z.real
    return float(z) if z.ndim == 0 else z


def quad_general(mean_adag: complex, mean_a: complex, params: OscillatorParams, t):
    """``<a^dag + a>(t)`` for an initial state with the given first moments."""
    b = params.beta
    k = decay_kernel(params, t)
    total = (mean_adag + b) * k.plus + (mean_a + b) * k.minus - 2.0 * b
    return _real(total, abs(mean_a) + abs(b))


def num_general(mean_n: float, mean_adag: complex, mean_a: complex, params: OscillatorParams, t):
    """``<a^dag a>(t)`` from the initial ``<a^dag a>``, ``<a^dag>`` and ``<a>``."""
    b = params.beta
    k = decay_kernel(params, t)
    constant = mean_n + b * (mean_adag + mean_a) + 2.0 * b * b
    total = constant - b * ((mean_adag + b) * k.plus + (mean_a + b) * k.minus)
    return _real(total, abs(mean_n) + abs(b) * (abs(mean_a) + abs(b)))


def quadrature_parts(mean_a: complex, params: OscillatorParams, t) -> ClosedFormResult:
    b = params.beta
    osc = (np.conj(mean_a) + b) * decay_kernel(params, t).plus
    const = -2.0 * b
    return ClosedFormResult(2.0 * np.real(osc) + const, osc, const)


def number_parts(mean_n: float, mean_a: complex, params: OscillatorParams, t) -> ClosedFormResult:
    b = params.beta
    osc = -b * (np.conj(mean_a) + b) * decay_kernel(params, t).plus
    const = float(np.real(mean_n + 2.0 * b * np.real(mean_a) + 2.0 * b * b))
    return ClosedFormResult(2.0 * np.real(osc) + const, osc, const)


def coherent_moments(alpha: complex) -> tuple[float, complex]:
    """``(<a^dag a>, <a>)`` of ``|alpha>``."""
    return abs(alpha) ** 2, complex(alpha)


def squeezed_moments(alpha: complex, z: SqueezeParameter) -> tuple[float, complex]:
    """``(<a^dag a>, <a>)`` of ``S(z)|alpha>`` from the Bogoliubov transform."""
    mu, nu = z.mu, z.nu
    ac = np.conj(alpha)
    mean_a = mu * alpha - nu * ac
    mean_n = (
        (mu**2 + abs(nu) ** 2) * abs(alpha) ** 2
        - mu * (nu * ac**2 + np.conj(nu) * alpha**2)
        + abs(nu) ** 2
    )
    return float(np.real(mean_n)), complex(mean_a)


def quad_coherent(alpha: complex, params: OscillatorParams, t):
    return quad_general(np.conj(alpha), alpha, params, t)


def num_coherent(alpha: complex, params: OscillatorParams, t):
    return num_general(abs(alpha) ** 2, np.conj(alpha), alpha, params, t)


def quad_squeezed(alpha: complex, z: SqueezeParameter, params: OscillatorParams, t):
    _, mean_a = squeezed_moments(alpha, z)
    return quad_general(np.conj(mean_a), mean_a, params, t)


def num_squeezed(alpha: complex, z: SqueezeParameter, params: OscillatorParams, t):
    mean_n, mean_a = squeezed_moments(alpha, z)
    return num_general(mean_n, np.conj(mean_a), mean_a, params, t)
