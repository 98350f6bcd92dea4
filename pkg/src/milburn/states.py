"""Initial-state descriptors.

A descriptor knows how to build its Fock vector and, for coherent and
squeezed states, which closed-form evaluators describe its evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closed_form as cf
from .fock import (
    OscillatorParams,
    SqueezeParameter,
    TruncationPolicy,
    coherent_state,
    fock_state,
    squeezed_state,
)


@dataclass(frozen=True)
class CoherentSpec:
    alpha: complex

    kind = "coherent"
    has_closed_form = True

    def prepare(self, policy: TruncationPolicy) -> np.ndarray:
        return coherent_state(self.alpha, policy)

    def closed_form(self, observable: str, params: OscillatorParams, t):
        if observable == "quadrature":
            return cf.quad_coherent(self.alpha, params, t)
        if observable == "number":
            return cf.num_coherent(self.alpha, params, t)
        raise ValueError(f"no closed form for observable {observable!r}")


@dataclass(frozen=True)
class SqueezedSpec:
    alpha: complex
    r: float
    theta: float = 0.0

    kind = "squeezed"
    has_closed_form = True

    @property
    def z(self) -> SqueezeParameter:
        return SqueezeParameter(self.r, self.theta)

    def prepare(self, policy: TruncationPolicy) -> np.ndarray:
        return squeezed_state(self.alpha, self.z, policy)

    def closed_form(self, observable: str, params: OscillatorParams, t):
        if observable == "quadrature":
            return cf.quad_squeezed(self.alpha, self.z, params, t)
        if observable == "number":
            return cf.num_squeezed(self.alpha, self.z, params, t)
        raise ValueError(f"no closed form for observable {observable!r}")


@dataclass(frozen=True)
class FockSpec:
    n: int

    kind = "fock"
    has_closed_form = False

    def prepare(self, policy: TruncationPolicy) -> np.ndarray:
        return fock_state(self.n, policy)

    def closed_form(self, observable, params, t):
        raise ValueError("Fock initial states have no closed-form track")


StateSpec = CoherentSpec | SqueezedSpec | FockSpec
