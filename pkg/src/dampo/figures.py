"""Reference figure definitions: the four kernel-evolution panels plus the
short-time comparison against the classical damped oscillator.

Rates are quoted in units of the classical friction rate (gamma_+ +
gamma_- = 1 for every set); the two panels per regime differ only in the
slow rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics, svgplot
from .spectral import ParametricDensity, make_parametric_density


@dataclass(frozen=True)
class FigureSpec:
    fig_id: str
    Gamma: float
    gamma_plus: complex
    gamma_minus: complex
    t_stop: float
    n_points: int
    title: str
    classical_overlay: bool = False


FIGURES: dict[str, FigureSpec] = {
    "2a": FigureSpec("2a", 0.01, 0.75, 0.25, 40.0, 1601,
                     "Slow-rate 0.01, real rate pair (overdamped-like)"),
    "2b": FigureSpec("2b", 0.01, 0.5 + 5j, 0.5 - 5j, 12.0, 1601,
                     "Slow-rate 0.01, complex rate pair (underdamped)"),
    "3a": FigureSpec("3a", 10.0, 0.75, 0.25, 20.0, 1601,
                     "Slow-rate 10, real rate pair (overshoot)"),
    "3b": FigureSpec("3b", 10.0, 0.5 + 5j, 0.5 - 5j, 12.0, 1601,
                     "Slow-rate 10, complex rate pair (underdamped)"),
    "4": FigureSpec("4", 10.0, 0.75, 0.25, 1.5, 601,
                    "Short-time kernel vs classical damped oscillator",
                    classical_overlay=True),
}


def density_for(fig_id: str) -> ParametricDensity:
    spec = FIGURES[fig_id]
    return make_parametric_density(spec.Gamma, spec.gamma_plus, spec.gamma_minus)


def figure_series(fig_id: str) -> dynamics.EvolutionSeries:
    spec = FIGURES[fig_id]
    sd = density_for(fig_id)
    times = np.linspace(0.0, spec.t_stop, spec.n_points)
    return dynamics.closed_form_kernels(sd, times)


def emit_figure(fig_id: str, svg_path, csv_path) -> dict:
    """Write the figure SVG and its backing CSV; returns summary facts."""
    spec = FIGURES[fig_id]
    sd = density_for(fig_id)
    series = figure_series(fig_id)
    stamp = (
        f"fig={fig_id} Gamma={spec.Gamma} gamma_plus={spec.gamma_plus} "
        f"gamma_minus={spec.gamma_minus} points={spec.n_points}"
    )
    lines = [svgplot.Line(series.times, series.c, label="exact kernel")]
    facts = {
        "fig_id": fig_id,
        "min_c": float(series.c.min()),
        "strict_class": dynamics.classify_damping(series).value
        if fig_id != "4" else None,
        "classical_label": dynamics.classical_damping_label(sd).value,
    }
    if spec.classical_overlay:
        classical = dynamics.classical_reference(sd, series.times)
        lines.append(svgplot.Line(series.times, classical,
                                  label="classical, long-time frequency", dash=True))
        facts["classical_min"] = float(classical.min())
    svgplot.line_plot(
        svg_path, lines, title=spec.title, xlabel="t (units of 1/gamma)",
        ylabel="displacement kernel", comment=stamp,
    )
    dynamics.write_series_csv(series, csv_path, header_comment=stamp)
    return facts
