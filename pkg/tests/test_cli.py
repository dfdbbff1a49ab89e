import json

import pytest

from integrity_kit.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """synth -> train on a small corpus, shared by the tests below."""
    d = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--schema", "example", "--n", "120", "--fake-frac", "0.15", "--seed", "42",
                 "--out", str(d / "data.csv")]) == 0
    assert main(["train", "--schema", "example", "--data", str(d / "data.csv"), "--rules", "example",
                 "--model", "rf", "--trees", "20", "--seed", "42", "--test-frac", "0.2",
                 "--out", str(d / "model.json"), "--report", str(d / "eval.json"),
                 "--scatter-inputs", str(d / "scatter-inputs.csv")]) == 0
    return d


def test_synth_train_filter_report(workdir, capsys):
    d = workdir
    assert main(["filter", "--model", str(d / "model.json"), "--schema", "example", "--rules", "example",
                 "--data", str(d / "data.csv"), "--retained", str(d / "a.csv"), "--flagged", str(d / "b.csv"),
                 "--segment-by", "primary_erp"]) == 0
    out = capsys.readouterr().out
    assert "retained" in out and '"primary_erp"' in out
    assert main(["report", "--eval", str(d / "eval.json"), "--scatter", str(d / "scatter-inputs.csv"),
                 "--out-dir", str(d / "report")]) == 0
    assert {p.name for p in (d / "report").iterdir()} == {"eval.json", "confusion_forest.svg", "importance.svg",
                                                         "scatter.csv"}


def test_eval_command(workdir):
    d = workdir
    assert main(["eval", "--model", str(d / "model.json"), "--schema", "example", "--data", str(d / "data.csv"),
                 "--report", str(d / "eval-all.json")]) == 0
    assert json.loads((d / "eval-all.json").read_text())["confusion"]["tn"] > 0


def test_train_reruns_byte_identical(workdir, tmp_path):
    d = workdir
    args = ["train", "--schema", "example", "--data", str(d / "data.csv"), "--rules", "example",
            "--model", "gbt", "--seed", "3"]
    assert main(args + ["--out", str(tmp_path / "m1.json"), "--report", str(tmp_path / "e1.json")]) == 0
    assert main(args + ["--out", str(tmp_path / "m2.json"), "--report", str(tmp_path / "e2.json")]) == 0
    assert (tmp_path / "m1.json").read_bytes() == (tmp_path / "m2.json").read_bytes()
    assert (tmp_path / "e1.json").read_bytes() == (tmp_path / "e2.json").read_bytes()


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("INTEGRITY_KIT_SEED", "17")
    assert main(["synth", "--schema", "example", "--n", "30", "--out", str(tmp_path / "env.csv")]) == 0
    assert main(["synth", "--schema", "example", "--n", "30", "--seed", "17", "--out", str(tmp_path / "flag.csv")]) == 0
    assert (tmp_path / "env.csv").read_bytes() == (tmp_path / "flag.csv").read_bytes()
    monkeypatch.setenv("INTEGRITY_KIT_SEED", "abc")
    assert main(["synth", "--schema", "example", "--n", "3", "--out", str(tmp_path / "x.csv")]) == 1


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["launch"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_required_flag_is_usage_error():
    assert main(["train", "--schema", "example"]) == 1


def test_missing_data_file_is_data_error(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    code = main(["train", "--schema", "example", "--data", str(missing), "--rules", "example",
                 "--out", str(tmp_path / "m.json"), "--report", str(tmp_path / "e.json")])
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_malformed_csv_is_data_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text('respondent_id,industry\nr1,"Retail\n')
    assert main(["eval", "--model", str(bad), "--schema", "example", "--data", str(bad),
                 "--report", str(tmp_path / "e.json")]) == 2


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "synth" in capsys.readouterr().out
