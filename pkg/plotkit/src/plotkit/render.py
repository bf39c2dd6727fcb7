"""Figure construction for the three comparison plot kinds.

Figures are built straight on a matplotlib Figure object (no pyplot, no
global state), with a fixed size, color order, and savefig metadata, so
rendering the same inputs twice produces byte-identical PNG files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from matplotlib.figure import Figure

from .io import SweepTable, read_sweep

# kind -> (x column, y column, CI columns or None, x label, y label)
KINDS = {
    "delay_vs_neglogc": (
        "neg_log_c", "avg_delay", ("delay_ci_lo", "delay_ci_hi"),
        "-log c", "average detection delay",
    ),
    "error_vs_delay": (
        "avg_delay", "error_rate", ("err_ci_lo", "err_ci_hi"),
        "average detection delay", "error probability",
    ),
    "risk_vs_neglogc": (
        # The schema carries no CI columns for Bayes risk, so no band.
        "neg_log_c", "bayes_risk", None,
        "-log c", "Bayes risk",
    ),
}

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
_FIGSIZE = (6.4, 4.4)
_DPI = 150


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: one kind, one or more CSVs, one output path."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    labels: tuple[str, ...] = field(default=())
    log_y: bool = False
    title: str = ""

    def problems(self) -> list[str]:
        out = []
        if self.kind not in KINDS:
            known = ", ".join(sorted(KINDS))
            out.append(f"kind: unknown kind {self.kind!r} (one of {known})")
        if not self.inputs:
            out.append("inputs: need at least one CSV path")
        if not self.out:
            out.append("out: need an output image path")
        if self.labels and len(self.labels) != len(self.inputs):
            out.append(
                f"labels: got {len(self.labels)} labels for "
                f"{len(self.inputs)} inputs"
            )
        return out


def _series_label(spec: PlotSpec, index: int, table: SweepTable,
                  policy: str) -> str:
    if spec.labels:
        return f"{spec.labels[index]} {policy}"
    if len(spec.inputs) > 1:
        # Disambiguate repeated policy names by the file they came from.
        return f"{table.path.stem} {policy}"
    return policy


def build_figure(spec: PlotSpec, tables: list[SweepTable]) -> Figure:
    """Lay out the figure: one line per (input, policy), CI band if the
    kind has CI columns, axes per kind."""
    x_col, y_col, ci_cols, x_label, y_label = KINDS[spec.kind]
    fig = Figure(figsize=_FIGSIZE)
    ax = fig.add_subplot()
    color_i = 0
    for index, table in enumerate(tables):
        for policy in table.policies:
            rows = sorted(table.series(policy), key=lambda r: r[x_col])
            xs = [r[x_col] for r in rows]
            ys = [r[y_col] for r in rows]
            color = _COLORS[color_i % len(_COLORS)]
            color_i += 1
            ax.plot(xs, ys, marker="o", markersize=3.5, color=color,
                    label=_series_label(spec, index, table, policy))
            if ci_cols is not None:
                los = [r[ci_cols[0]] for r in rows]
                his = [r[ci_cols[1]] for r in rows]
                ax.fill_between(xs, los, his, color=color, alpha=0.2,
                                linewidth=0)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(alpha=0.3)
    ax.legend()
    return fig


def render(spec: PlotSpec) -> Path:
    """Validate, read every input, draw, and write the image.

    Nothing is written until all inputs have parsed cleanly, so a schema
    error or an empty CSV leaves no output file behind.
    """
    issues = spec.problems()
    if issues:
        raise ValueError("invalid plot spec:\n  " + "\n  ".join(issues))
    tables = [read_sweep(p) for p in spec.inputs]
    fig = build_figure(spec, tables)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", dpi=_DPI,
                metadata={"Software": "plotkit"})
    return out
