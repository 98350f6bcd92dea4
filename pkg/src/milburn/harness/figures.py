"""Built-in configurations for the four standard figures.

Figures 1-2 sweep the displacement strength for a coherent state,
figures 3-4 sweep the squeeze phase at fixed ``r`` over 0, pi/2 and pi,
each labelled in the legend.
The anti-squeezed phase puts ~2e-10 of population above level 90, so the
squeezed figures use a 128-level basis.
"""

from __future__ import annotations

import math

from ..fock import OscillatorParams, TruncationPolicy
from ..states import CoherentSpec, SqueezedSpec
from .config import ExperimentConfig, Sweep

ALPHA = 4.0
OMEGA = 4.0
GAMMA = 10.0
LAMBDAS = (0.1, 0.7, 1.5)
SQUEEZE_LAMBDA = 0.7
SQUEEZE_R = 0.3
THETAS = (0.0, math.pi / 2, math.pi)
T_END = 6.0
T_POINTS = 1501
SQUEEZED_CUTOFF = 128
METHODS = ("closed_form", "series")


def _coherent(name, observable):
    return ExperimentConfig(
        params=OscillatorParams(OMEGA, LAMBDAS[0], GAMMA),
        policy=TruncationPolicy(),
        state=CoherentSpec(complex(ALPHA)),
        t_start=0.0,
        t_end=T_END,
        t_points=T_POINTS,
        observables=(observable,),
        methods=METHODS,
        sweep=Sweep("params.lambda", LAMBDAS),
        name=name,
    )


def _squeezed(name, observable):
    return ExperimentConfig(
        params=OscillatorParams(OMEGA, SQUEEZE_LAMBDA, GAMMA),
        policy=TruncationPolicy(fock_cutoff=SQUEEZED_CUTOFF),
        state=SqueezedSpec(complex(ALPHA), SQUEEZE_R, 0.0),
        t_start=0.0,
        t_end=T_END,
        t_points=T_POINTS,
        observables=(observable,),
        methods=METHODS,
        sweep=Sweep("state.theta", THETAS),
        name=name,
    )


def figure_configs() -> dict[str, ExperimentConfig]:
    return {
        "fig1": _coherent("fig1", "quadrature"),
        "fig2": _coherent("fig2", "number"),
        "fig3": _squeezed("fig3", "quadrature"),
        "fig4": _squeezed("fig4", "number"),
    }


TITLES = {
    "fig1": "coherent state, α = 4, ω = 4, γ = 10",
    "fig2": "coherent state, α = 4, ω = 4, γ = 10",
    "fig3": "squeezed state, α = 4, ω = 4, γ = 10, λ = 0.7, r = 0.3",
    "fig4": "squeezed state, α = 4, ω = 4, γ = 10, λ = 0.7, r = 0.3",
}
