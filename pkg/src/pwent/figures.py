"""Deterministic CSV grids for the built-in survey families.

fig1 sweeps the two-parameter isotropic mixture, fig2a/fig2b sweep the
one-parameter Bell mixtures, and fig3a/fig3b evaluate the partitewise
measures on the spectral purifications of the fig2 states. Values are
emitted with 12 significant digits; identical arguments produce
byte-identical output.
"""

from __future__ import annotations

import io

import numpy as np

from .extensibility import canonical_purification, default_extensibility_config, extensibility
from .measures import (
    MeasureConfig,
    genuine_partitewise_gem,
    partitewise_bipartition,
    partitewise_gem,
    wootters_concurrence,
)
from .registers import DensityMatrix
from .states import fig1_state, fig2a_state, fig2b_state

__all__ = ["FIGURE_IDS", "figure_table", "write_csv", "figure_csv"]

FIGURE_IDS = ("fig1", "fig2a", "fig2b", "fig3a", "fig3b")


def _grid(resolution: int) -> np.ndarray:
    if resolution < 11:
        raise ValueError("resolution must be at least 11 points per axis")
    return np.linspace(0.0, 1.0, resolution)


def _mixture_row(rho: DensityMatrix) -> list[float]:
    return [
        1.0 - rho.purity(),
        wootters_concurrence(rho),
        extensibility(rho),
    ]


def figure_table(fig_id: str, resolution: int = 101) -> tuple[list[str], list[list[float]]]:
    """Header and rows for one figure id."""
    ps = _grid(resolution)
    if fig_id == "fig1":
        header = ["p", "t", "S_L(AB)", "E(AB)", "E_ext"]
        rows = [[p, t] + _mixture_row(fig1_state(p, t)) for p in ps for t in ps]
        return header, rows
    if fig_id in ("fig2a", "fig2b"):
        family = fig2a_state if fig_id == "fig2a" else fig2b_state
        header = ["p", "S_L(AB)", "E(AB)", "E_ext"]
        rows = [[p] + _mixture_row(family(p)) for p in ps]
        return header, rows
    if fig_id in ("fig3a", "fig3b"):
        family = fig2a_state if fig_id == "fig3a" else fig2b_state
        cfg = MeasureConfig(reduced="lin_sqrt", genuine_form="half_sum")
        header = ["p", "pwem_gem(AB)", "gpwem_gem(AB)", "pw_min(AB)", "E(AB)", "E_ext"]
        rows = []
        for p in ps:
            rho = family(p)
            psi = canonical_purification(rho).state
            rows.append([
                p,
                partitewise_gem(psi, (0, 1), cfg),
                genuine_partitewise_gem(psi, (0, 1), cfg),
                partitewise_bipartition(psi, (0, 1), "lin_sqrt", "min"),
                wootters_concurrence(rho),
                extensibility(rho, default_extensibility_config()),
            ])
        return header, rows
    raise ValueError(f"unknown figure id {fig_id!r}; choose from {FIGURE_IDS}")


def write_csv(stream, header: list[str], rows) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(f"{x:.12g}" for x in row) + "\n")


def figure_csv(fig_id: str, resolution: int = 101) -> str:
    header, rows = figure_table(fig_id, resolution)
    out = io.StringIO()
    write_csv(out, header, rows)
    return out.getvalue()
