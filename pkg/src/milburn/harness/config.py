"""Experiment configuration: a flat TOML document with dotted keys.

Example::

    params.omega = 4.0
    params.lambda = 0.7
    params.gamma = 10.0
    state.kind = "coherent"
    state.alpha_re = 4.0
    run.observables = ["quadrature"]
    run.methods = ["closed_form", "series"]
    sweep.field = "params.lambda"
    sweep.values = [0.1, 0.7, 1.5]
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ParseError, ValidationError
from ..evolution import METHODS
from ..fock import OscillatorParams, TruncationPolicy
from ..states import CoherentSpec, FockSpec, SqueezedSpec

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

OBSERVABLES = ("quadrature", "number")
STATE_KINDS = ("coherent", "squeezed", "fock")

# key -> (expected type, default); None default means required or kind-dependent
SCHEMA = {
    "params.omega": (float, None),
    "params.lambda": (float, None),
    "params.gamma": (float, None),
    "state.kind": (str, None),
    "state.alpha_re": (float, 0.0),
    "state.alpha_im": (float, 0.0),
    "state.r": (float, None),
    "state.theta": (float, 0.0),
    "state.n": (int, None),
    "grid.t_start": (float, 0.0),
    "grid.t_end": (float, 10.0),
    "grid.points": (int, 1001),
    "run.observables": (list, list(OBSERVABLES)),
    "run.methods": (list, None),
    "sweep.field": (str, None),
    "sweep.values": (list, None),
    "policy.fock_cutoff": (int, 96),
    "policy.edge_tolerance": (float, 1e-10),
    "policy.poisson_tail_tol": (float, 1e-12),
}

SWEEPABLE = (
    "params.omega", "params.lambda", "params.gamma",
    "state.alpha_re", "state.alpha_im", "state.r", "state.theta", "state.n",
    "policy.fock_cutoff",
)


@dataclass(frozen=True)
class Sweep:
    field: str
    values: tuple


@dataclass(frozen=True)
class Case:
    """One fully-resolved point of a sweep."""

    label: str | None
    params: OscillatorParams
    policy: TruncationPolicy
    state: CoherentSpec | SqueezedSpec | FockSpec
    sweep_field: str | None = None
    sweep_value: float | int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    params: OscillatorParams
    policy: TruncationPolicy
    state: CoherentSpec | SqueezedSpec | FockSpec
    t_start: float = 0.0
    t_end: float = 10.0
    t_points: int = 1001
    observables: tuple = OBSERVABLES
    methods: tuple = ("series", "closed_form")
    sweep: Sweep | None = None
    name: str = "experiment"

    def time_grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.t_points)

    def cases(self) -> list[Case]:
        if self.sweep is None:
            return [Case(None, self.params, self.policy, self.state)]
        return [_apply_sweep(self, self.sweep.field, v) for v in self.sweep.values]


def _flatten(doc: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in doc.items():
        full = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, full + "."))
        else:
            out[full] = value
    return out


def _coerce(key: str, value, kind):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(key, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ValidationError(key, "must be finite")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(key, f"expected an integer, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ValidationError(key, f"expected a string, got {value!r}")
        return value
    if not isinstance(value, list):
        raise ValidationError(key, f"expected a list, got {value!r}")
    return value


def _format_value(value) -> str:
    return format(value, ".6g") if isinstance(value, float) else str(value)


def _build_state(raw: dict):
    kind = raw["state.kind"]
    alpha = complex(raw["state.alpha_re"], raw["state.alpha_im"])
    if kind == "coherent":
        return CoherentSpec(alpha)
    if kind == "squeezed":
        if raw.get("state.r") is None:
            raise ValidationError("state.r", "required for squeezed states")
        if raw["state.r"] < 0:
            raise ValidationError("state.r", "must be >= 0")
        return SqueezedSpec(alpha, raw["state.r"], raw["state.theta"])
    if raw.get("state.n") is None:
        raise ValidationError("state.n", "required for fock states")
    if raw["state.n"] < 0:
        raise ValidationError("state.n", "must be >= 0")
    return FockSpec(raw["state.n"])


def _build_params(raw: dict) -> OscillatorParams:
    for key in ("params.omega", "params.gamma"):
        if raw[key] <= 0:
            raise ValidationError(key, "must be positive")
    return OscillatorParams(raw["params.omega"], raw["params.lambda"], raw["params.gamma"])


def _build_policy(raw: dict) -> TruncationPolicy:
    if raw["policy.fock_cutoff"] < 2:
        raise ValidationError("policy.fock_cutoff", "must be >= 2")
    if raw["policy.edge_tolerance"] < 0:
        raise ValidationError("policy.edge_tolerance", "must be >= 0")
    if raw["policy.poisson_tail_tol"] <= 0:
        raise ValidationError("policy.poisson_tail_tol", "must be > 0")
    return TruncationPolicy(
        raw["policy.fock_cutoff"], raw["policy.edge_tolerance"], raw["policy.poisson_tail_tol"]
    )


def _raw_from_config(config: ExperimentConfig) -> dict:
    state = config.state
    raw = {
        "params.omega": config.params.omega,
        "params.lambda": config.params.lambda_,
        "params.gamma": config.params.gamma,
        "state.kind": state.kind,
        "state.alpha_re": 0.0,
        "state.alpha_im": 0.0,
        "state.r": None,
        "state.theta": 0.0,
        "state.n": None,
        "policy.fock_cutoff": config.policy.fock_cutoff,
        "policy.edge_tolerance": config.policy.edge_tolerance,
        "policy.poisson_tail_tol": config.policy.poisson_tail_tol,
    }
    if state.kind in ("coherent", "squeezed"):
        raw["state.alpha_re"] = complex(state.alpha).real
        raw["state.alpha_im"] = complex(state.alpha).imag
    if state.kind == "squeezed":
        raw["state.r"] = state.r
        raw["state.theta"] = state.theta
    if state.kind == "fock":
        raw["state.n"] = state.n
    return raw


def _apply_sweep(config: ExperimentConfig, field: str, value) -> Case:
    raw = _raw_from_config(config)
    raw[field] = value
    label = f"{field.split('.', 1)[1]}={_format_value(value)}"
    try:
        return Case(label, _build_params(raw), _build_policy(raw), _build_state(raw), field, value)
    except ValidationError as exc:
        raise ValidationError(exc.field, f"sweep value {value!r}: {exc}") from None


def _validate(raw: dict, name: str) -> ExperimentConfig:
    for key in ("params.omega", "params.lambda", "params.gamma", "state.kind"):
        if raw.get(key) is None:
            raise ValidationError(key, "required")
    if raw["state.kind"] not in STATE_KINDS:
        raise ValidationError("state.kind", f"must be one of {STATE_KINDS}")

    params = _build_params(raw)
    policy = _build_policy(raw)
    state = _build_state(raw)

    t_start, t_end, points = raw["grid.t_start"], raw["grid.t_end"], raw["grid.points"]
    if t_start < 0:
        raise ValidationError("grid.t_start", "must be >= 0")
    if not t_end > t_start:
        raise ValidationError("grid.t_end", f"must be greater than grid.t_start ({t_start})")
    if points < 2:
        raise ValidationError("grid.points", "must be >= 2")

    observables = raw["run.observables"]
    if not observables or any(o not in OBSERVABLES for o in observables):
        raise ValidationError("run.observables", f"must be a non-empty subset of {OBSERVABLES}")
    if len(set(observables)) != len(observables):
        raise ValidationError("run.observables", "duplicate entries")

    methods = raw["run.methods"]
    if methods is None:
        methods = ["series", "closed_form"] if state.has_closed_form else ["series", "displaced_frame"]
    if not methods or any(m not in METHODS for m in methods):
        raise ValidationError("run.methods", f"must be a non-empty subset of {METHODS}")
    if len(set(methods)) != len(methods):
        raise ValidationError("run.methods", "duplicate entries")
    if "closed_form" in methods and not state.has_closed_form:
        raise ValidationError("run.methods", "closed_form requires a coherent or squeezed state")
    if "lindblad" in methods and t_start != 0:
        raise ValidationError("run.methods", "lindblad requires grid.t_start = 0")

    sweep = None
    if (raw["sweep.field"] is None) != (raw["sweep.values"] is None):
        missing = "sweep.values" if raw["sweep.values"] is None else "sweep.field"
        raise ValidationError(missing, "sweep.field and sweep.values must be given together")
    if raw["sweep.field"] is not None:
        field = raw["sweep.field"]
        if field not in SWEEPABLE:
            raise ValidationError("sweep.field", f"must be one of {SWEEPABLE}")
        values = raw["sweep.values"]
        if not values:
            raise ValidationError("sweep.values", "must be non-empty")
        kind = SCHEMA[field][0]
        values = tuple(_coerce("sweep.values", v, kind) for v in values)
        if field == "state.r" and state.kind != "squeezed":
            raise ValidationError("sweep.field", "state.r can only be swept for squeezed states")
        if field == "state.n" and state.kind != "fock":
            raise ValidationError("sweep.field", "state.n can only be swept for fock states")
        if field.startswith("state.alpha") and state.kind == "fock":
            raise ValidationError("sweep.field", f"{field} does not apply to fock states")
        sweep = Sweep(field, values)

    config = ExperimentConfig(
        params=params,
        policy=policy,
        state=state,
        t_start=t_start,
        t_end=t_end,
        t_points=points,
        observables=tuple(observables),
        methods=tuple(methods),
        sweep=sweep,
        name=name,
    )
    config.cases()  # surface per-case validation errors now
    return config


def parse_config(text: str, name: str = "experiment") -> ExperimentConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        msg = getattr(exc, "msg", str(exc))
        raise ParseError(msg if line is not None else str(exc), line=line) from None
    flat = _flatten(doc)
    unknown = sorted(set(flat) - set(SCHEMA))
    if unknown:
        raise ValidationError(unknown[0], "unknown key")
    raw = {}
    for key, (kind, default) in SCHEMA.items():
        raw[key] = _coerce(key, flat[key], kind) if key in flat else default
    return _validate(raw, name)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Read and validate a config file; the file stem names the outputs."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, name=os.path.splitext(os.path.basename(path))[0])


def with_sweep(config: ExperimentConfig, field: str, values) -> ExperimentConfig:
    """Copy of ``config`` sweeping ``field``; used by the built-in figure set."""
    out = replace(config, sweep=Sweep(field, tuple(values)))
    out.cases()
    return out
