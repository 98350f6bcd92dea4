"""CSV, gnuplot and report writers.

Everything here is deterministic: no timestamps, fixed column order and
17 significant digits so that a rerun is byte-identical.
"""

from __future__ import annotations

import math
import os
from collections.abc import Sequence

import numpy as np

from ..evolution import TimeSeries
from .experiment import CaseResult, ValidationReport

METHOD_PREFERENCE = ("closed_form", "series", "displaced_frame", "lindblad")
AXIS_LABELS = {
    "quadrature": "⟨a^{†} + a⟩",
    "number": "⟨a^{†}a⟩",
}
SYMBOLS = {"lambda": "λ", "theta": "θ", "gamma": "γ", "omega": "ω", "r": "r", "n": "n"}


def _as_cases(data) -> list[CaseResult]:
    if isinstance(data, TimeSeries):
        return [CaseResult(None, data)]
    return list(data)


def csv_columns(cases: Sequence[CaseResult]) -> list[tuple[str, int, tuple[str, str]]]:
    """``(header, case index, track key)`` in output order."""
    keys = sorted({key for c in cases for key in c.series.tracks})
    multi = len(cases) > 1
    cols = []
    for key in keys:
        for i, case in enumerate(cases):
            if key not in case.series.tracks:
                continue
            name = f"{key[0]}.{key[1]}"
            if multi:
                name += f"@{case.label}"
            cols.append((name, i, key))
    return cols


def emit_csv(data, path) -> None:
    """Write one time column plus one column per track (and per sweep case)."""
    cases = _as_cases(data)
    times = cases[0].series.times
    for c in cases[1:]:
        if not np.array_equal(c.series.times, times):
            raise ValueError("all cases must share the same time grid")
    cols = csv_columns(cases)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["t"] + [name for name, _, _ in cols]) + "\n")
        for row, t in enumerate(times):
            values = [t] + [cases[i].series.tracks[key][row] for _, i, key in cols]
            fh.write(",".join(f"{v:.16e}" for v in values) + "\n")


def _pretty_value(field: str, value) -> str:
    if field == "theta":
        quarters = float(value) / (math.pi / 4)
        if abs(quarters - round(quarters)) < 1e-9:
            q = round(quarters)
            if q == 0:
                return "0"
            g = math.gcd(q, 4)
            num, den = q // g, 4 // g
            head = "π" if num == 1 else f"{num}π"
            return head if den == 1 else f"{head}/{den}"
    return format(value, ".6g") if isinstance(value, float) else str(value)


def legend_label(case: CaseResult) -> str:
    if case.sweep_field is None:
        return case.label or ""
    field = case.sweep_field.split(".", 1)[1]
    return f"{SYMBOLS.get(field, field)} = {_pretty_value(field, case.sweep_value)}"


def emit_plot_script(data, report: ValidationReport | None, path, csv_name: str,
                     title: str = "") -> None:
    """gnuplot script that draws one curve per sweep case from ``csv_name``.

    The CSV is referenced by a path relative to the script's directory.
    """
    cases = _as_cases(data)
    cols = csv_columns(cases)
    index = {(i, key): n + 2 for n, (_, i, key) in enumerate(cols)}
    observables = sorted({key[0] for _, _, key in cols}, key=lambda o: list(AXIS_LABELS).index(o)
                         if o in AXIS_LABELS else len(AXIS_LABELS))
    stem = os.path.splitext(os.path.basename(path))[0]
    lines = [
        f"# gnuplot script for {csv_name}; run with: gnuplot {os.path.basename(path)}",
        "set datafile separator ','",
        "set encoding utf8",
        f"set terminal pngcairo size 900,{450 * len(observables)} enhanced",
        f"set output '{stem}.png'",
        "set xlabel 't'",
        "set key top right",
        "set grid",
    ]
    if report is not None:
        status = "PASS" if report.passed else "FAIL"
        lines.append(f"# validation: {status} at tolerance {report.tolerance:.1e}")
    if len(observables) > 1:
        lines.append(f"set multiplot layout {len(observables)},1")
    for obs in observables:
        methods = {key[1] for _, _, key in cols if key[0] == obs}
        method = next(m for m in METHOD_PREFERENCE if m in methods)
        lines.append(f"set ylabel '{AXIS_LABELS.get(obs, obs)}'")
        if title:
            lines.append(f"set title '{title}'")
        parts = []
        for i, case in enumerate(cases):
            col = index.get((i, (obs, method)))
            if col is None:
                continue
            name = legend_label(case) or method.replace("_", " ")
            parts.append(f"'{csv_name}' using 1:{col} with lines lw 1.5 title '{name}'")
        lines.append("plot " + ", \\\n     ".join(parts))
    if len(observables) > 1:
        lines.append("unset multiplot")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_report(report: ValidationReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.to_text())
