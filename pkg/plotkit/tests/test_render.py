import math
from pathlib import Path

import pytest

from plotkit import (KINDS, PlotSpec, SchemaError, build_figure, read_sweep,
                     render)

ACCEPTANCE_CSV = (Path(__file__).resolve().parents[2]
                  / "artifacts" / "acceptance" / "fig2_exp.csv")


def test_read_sweep_parses_rows_and_policies(sweep_csv):
    table = read_sweep(sweep_csv())
    assert table.policies == ("adhm", "dgf", "chernoff")
    assert len(table.rows) == 9
    row = table.series("adhm")[0]
    assert row["neg_log_c"] == 2.0
    assert math.isclose(row["c"], math.exp(-2))
    # Everything except the policy name comes back as float.
    assert isinstance(row["trials"], float)


def test_read_sweep_names_missing_columns(sweep_csv):
    path = sweep_csv(drop="bayes_risk")
    with pytest.raises(SchemaError, match="bayes_risk"):
        read_sweep(path)


def test_read_sweep_rejects_headerless_rows(sweep_csv, tmp_path):
    path = tmp_path / "junk.csv"
    path.write_text("1,2,3\n4,5,6\n")
    with pytest.raises(SchemaError, match="missing column"):
        read_sweep(path)


def test_read_sweep_rejects_empty(sweep_csv):
    path = sweep_csv(with_rows=False)
    with pytest.raises(SchemaError, match="no data rows"):
        read_sweep(path)


def test_read_sweep_rejects_non_numeric(sweep_csv):
    path = sweep_csv()
    text = path.read_text().replace("0.0,7,", "oops,7,", 1)
    path.write_text(text)
    with pytest.raises(SchemaError, match="non-numeric"):
        read_sweep(path)


def test_one_line_per_policy_with_bands(sweep_csv):
    path = sweep_csv()
    spec = PlotSpec("delay_vs_neglogc", (str(path),), "unused.png")
    fig = build_figure(spec, [read_sweep(path)])
    ax = fig.axes[0]
    assert len(ax.get_lines()) == 3
    assert len(ax.collections) == 3  # one CI band per series
    assert [ln.get_label() for ln in ax.get_lines()] == [
        "adhm", "dgf", "chernoff"]


def test_risk_kind_has_no_band(sweep_csv):
    path = sweep_csv()
    spec = PlotSpec("risk_vs_neglogc", (str(path),), "unused.png")
    fig = build_figure(spec, [read_sweep(path)])
    ax = fig.axes[0]
    assert len(ax.get_lines()) == 3
    assert len(ax.collections) == 0


def test_axes_per_kind(sweep_csv):
    path = sweep_csv()
    table = read_sweep(path)
    labels = {}
    for kind in KINDS:
        fig = build_figure(PlotSpec(kind, (str(path),), "u.png"), [table])
        ax = fig.axes[0]
        labels[kind] = (ax.get_xlabel(), ax.get_ylabel())
    assert labels["delay_vs_neglogc"] == ("-log c", "average detection delay")
    assert labels["error_vs_delay"] == ("average detection delay",
                                        "error probability")
    assert labels["risk_vs_neglogc"] == ("-log c", "Bayes risk")


def test_log_y_toggle(sweep_csv):
    path = sweep_csv()
    table = read_sweep(path)
    plain = build_figure(
        PlotSpec("error_vs_delay", (str(path),), "u.png"), [table])
    logged = build_figure(
        PlotSpec("error_vs_delay", (str(path),), "u.png", log_y=True),
        [table])
    assert plain.axes[0].get_yscale() == "linear"
    assert logged.axes[0].get_yscale() == "log"


def test_series_sorted_by_x(sweep_csv):
    # Rows arrive grouped by policy; each line must still be drawn with
    # ascending x so the polyline does not double back.
    path = sweep_csv(nlcs=(6, 2, 4))
    spec = PlotSpec("delay_vs_neglogc", (str(path),), "u.png")
    fig = build_figure(spec, [read_sweep(path)])
    xs = list(fig.axes[0].get_lines()[0].get_xdata())
    assert xs == sorted(xs)


def test_two_inputs_get_label_prefixes(sweep_csv):
    a = sweep_csv("first.csv")
    b = sweep_csv("second.csv")
    tables = [read_sweep(a), read_sweep(b)]
    named = build_figure(
        PlotSpec("delay_vs_neglogc", (str(a), str(b)), "u.png",
                 labels=("lo", "hi")), tables)
    labels = [ln.get_label() for ln in named.axes[0].get_lines()]
    assert labels[0] == "lo adhm" and labels[3] == "hi adhm"
    bare = build_figure(
        PlotSpec("delay_vs_neglogc", (str(a), str(b)), "u.png"), tables)
    labels = [ln.get_label() for ln in bare.axes[0].get_lines()]
    assert labels[0] == "first adhm" and labels[5] == "second chernoff"


def test_render_writes_png(sweep_csv, tmp_path):
    out = tmp_path / "fig" / "delay.png"
    spec = PlotSpec("delay_vs_neglogc", (str(sweep_csv()),), str(out))
    got = render(spec)
    assert got == out
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_is_bit_stable(sweep_csv, tmp_path):
    path = sweep_csv()
    first = tmp_path / "a.png"
    second = tmp_path / "b.png"
    render(PlotSpec("risk_vs_neglogc", (str(path),), str(first), log_y=True))
    render(PlotSpec("risk_vs_neglogc", (str(path),), str(second), log_y=True))
    assert first.read_bytes() == second.read_bytes()


def test_render_does_not_mutate_inputs(sweep_csv, tmp_path):
    path = sweep_csv()
    before = path.read_bytes()
    render(PlotSpec("error_vs_delay", (str(path),), str(tmp_path / "e.png")))
    assert path.read_bytes() == before


def test_render_empty_csv_leaves_no_file(sweep_csv, tmp_path):
    path = sweep_csv(with_rows=False)
    out = tmp_path / "never.png"
    with pytest.raises(SchemaError, match="no data rows"):
        render(PlotSpec("delay_vs_neglogc", (str(path),), str(out)))
    assert not out.exists()


def test_render_schema_error_leaves_no_file(sweep_csv, tmp_path):
    path = sweep_csv(drop="avg_delay")
    out = tmp_path / "never.png"
    with pytest.raises(SchemaError, match="avg_delay"):
        render(PlotSpec("delay_vs_neglogc", (str(path),), str(out)))
    assert not out.exists()


def test_spec_problems():
    bad = PlotSpec("sideways", (), "", labels=("a",))
    issues = bad.problems()
    assert len(issues) == 4
    assert any("sideways" in i for i in issues)
    with pytest.raises(ValueError, match="invalid plot spec"):
        render(bad)
    ok = PlotSpec("risk_vs_neglogc", ("x.csv",), "x.png")
    assert ok.problems() == []


@pytest.mark.skipif(not ACCEPTANCE_CSV.exists(),
                    reason="acceptance sweep output not present")
def test_renders_acceptance_sweep(tmp_path):
    table = read_sweep(ACCEPTANCE_CSV)
    for kind in KINDS:
        out = tmp_path / f"{kind}.png"
        render(PlotSpec(kind, (str(ACCEPTANCE_CSV),), str(out),
                        log_y=(kind != "delay_vs_neglogc")))
        assert out.stat().st_size > 0
    fig = build_figure(
        PlotSpec("delay_vs_neglogc", (str(ACCEPTANCE_CSV),), "u.png"),
        [table])
    assert len(fig.axes[0].get_lines()) == len(table.policies)
