from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import TruncationError
from ..evolution import TimeSeries, run_timeseries
from .config import ExperimentConfig

log = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Comparison:
    case: str
    pair: tuple[str, str]
    max_dev: float
    per_observable: dict
    passed: bool


@dataclass
class ValidationReport:
    tolerance: float
    comparisons: list[Comparison] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    def to_text(self) -> str:
        lines = [f"# method-pair validation, tolerance {self.tolerance:.3e}"]
        for c in self.comparisons:
            status = "PASS" if c.passed else "FAIL"
            detail = " ".join(f"{k}={v:.3e}" for k, v in c.per_observable.items())
            lines.append(
                f"CASE {c.case} PAIR {c.pair[0]}/{c.pair[1]} MAXDEV {c.max_dev:.6e} {status} ({detail})"
            )
        for case, diag in self.diagnostics.items():
            items = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(diag.items()))
            lines.append(f"DIAG {case} {items}")
        lines.append(f"RESULT {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.3e}"


@dataclass
class CaseResult:
    label: str | None
    series: TimeSeries
    sweep_field: str | None = None
    sweep_value: float | int | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cases: list[CaseResult]
    report: ValidationReport


def compare_methods(series: TimeSeries, observables, methods, case: str, tolerance: float):
    out = []
    for m1, m2 in itertools.combinations(methods, 2):
        per_obs = {
            obs: float(np.max(np.abs(series[obs, m1] - series[obs, m2]))) for obs in observables
        }
        max_dev = max(per_obs.values())
        out.append(Comparison(case, (m1, m2), max_dev, per_obs, bool(max_dev < tolerance)))
    return out


def run_experiment(config: ExperimentConfig, tolerance: float = DEFAULT_TOLERANCE) -> ExperimentResult:
    """Evaluate every sweep case with every configured method and compare them pairwise."""
    grid = config.time_grid()
    report = ValidationReport(tolerance)
    results = []
    for case in config.cases():
        label = case.label or config.name
        log.info("running case %s", label)
        try:
            series = run_timeseries(
                case.state, case.params, case.policy, grid, config.observables, config.methods
            )
        except TruncationError as exc:
            raise TruncationError(f"case {label}: {exc}") from exc
        results.append(CaseResult(case.label, series, case.sweep_field, case.sweep_value))
        report.comparisons.extend(
            compare_methods(series, config.observables, config.methods, label, tolerance)
        )
        report.diagnostics[label] = dict(series.diagnostics)
    return ExperimentResult(config, results, report)
