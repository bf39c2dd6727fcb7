import yaml

from plotkit.cli import main


def test_positional_form_writes_png(sweep_csv, tmp_path, capsys):
    out = tmp_path / "delay.png"
    code = main(["delay_vs_neglogc", str(sweep_csv()), "-o", str(out)])
    assert code == 0
    assert out.exists()
    assert str(out) in capsys.readouterr().out


def test_spec_file_form(sweep_csv, tmp_path):
    out = tmp_path / "risk.png"
    spec_path = tmp_path / "spec.yaml"
    spec_path.write_text(yaml.safe_dump({
        "kind": "risk_vs_neglogc",
        "inputs": [str(sweep_csv())],
        "out": str(out),
        "log_y": True,
        "title": "risk comparison",
    }))
    assert main(["--spec", str(spec_path)]) == 0
    assert out.exists()


def test_spec_file_rejects_unknown_keys(sweep_csv, tmp_path, capsys):
    spec_path = tmp_path / "spec.yaml"
    spec_path.write_text(yaml.safe_dump({
        "kind": "risk_vs_neglogc",
        "inputs": [str(sweep_csv())],
        "out": "x.png",
        "colour": "red",
    }))
    assert main(["--spec", str(spec_path)]) == 2
    assert "colour" in capsys.readouterr().err


def test_spec_and_positionals_conflict(sweep_csv, tmp_path, capsys):
    code = main(["delay_vs_neglogc", str(sweep_csv()),
                 "--spec", str(tmp_path / "s.yaml")])
    assert code == 2
    assert "replaces" in capsys.readouterr().err


def test_unknown_kind_is_usage_error(sweep_csv, capsys):
    assert main(["sideways", str(sweep_csv()), "-o", "x.png"]) == 2
    assert "sideways" in capsys.readouterr().err


def test_missing_out_is_usage_error(sweep_csv, capsys):
    assert main(["delay_vs_neglogc", str(sweep_csv())]) == 2
    assert "need" in capsys.readouterr().err


def test_missing_input_file(tmp_path, capsys):
    code = main(["delay_vs_neglogc", str(tmp_path / "nope.csv"),
                 "-o", str(tmp_path / "x.png")])
    assert code == 2
    assert "nope.csv" in capsys.readouterr().err


def test_schema_mismatch_exits_one(sweep_csv, tmp_path, capsys):
    path = sweep_csv(drop="error_rate")
    code = main(["error_vs_delay", str(path), "-o", str(tmp_path / "x.png")])
    assert code == 1
    assert "error_rate" in capsys.readouterr().err


def test_empty_csv_exits_one_without_file(sweep_csv, tmp_path, capsys):
    out = tmp_path / "never.png"
    code = main(["delay_vs_neglogc", str(sweep_csv(with_rows=False)),
                 "-o", str(out)])
    assert code == 1
    assert not out.exists()
    assert "no data rows" in capsys.readouterr().err


def test_label_count_mismatch(sweep_csv, capsys):
    code = main(["delay_vs_neglogc", str(sweep_csv()), "-o", "x.png",
                 "--label", "a", "--label", "b"])
    assert code == 2
    assert "labels" in capsys.readouterr().err
