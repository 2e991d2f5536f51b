import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from gdcscreen.cli import main
from gdcscreen.core import Dataset, write_csv


def _schema(name):
    return json.loads(resources.files("gdcscreen").joinpath("schemas", name).read_text())


@pytest.fixture
def data_csv(tmp_path):
    rng = np.random.default_rng(0)
    y = np.arange(40) % 2
    X = rng.standard_normal((40, 6))
    X[:, 2] += 3 * y
    path = tmp_path / "data.csv"
    write_csv(Dataset(X, y, column_names=tuple(f"x{j}" for j in range(6))), path, "class")
    return path


def _screen(capsys, *argv):
    code = main(["screen", *argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_minimal_screen_report(data_csv, capsys):
    code, out, _ = _screen(capsys, "--data", str(data_csv), "--label", "class")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, _schema("report.schema.json"))
    assert sorted(doc["ranking"]) == list(range(6))
    assert doc["ranking"][0] == 2
    assert doc["config"]["rule"] == {"type": "top_d", "d": 6}
    assert doc["input"]["n"] == 40 and doc["groups"][2]["columns"] == ["x2"]


@pytest.mark.parametrize("measure", ["gdc", "dt", "mv", "r2"])
def test_threshold_report_validates(data_csv, tmp_path, capsys, measure):
    out = tmp_path / "r.json"
    code, _, _ = _screen(capsys, "--data", str(data_csv), "--label", "6", "--measure", measure,
                         "--threshold-c", "0.5", "--kappa", "0.1", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, _schema("report.schema.json"))
    cut = doc["config"]["rule"]["cutoff"]
    assert all(g["selected"] == (g["statistic"] >= cut) for g in doc["groups"])


def test_mv_with_multivariate_group_exits_2(data_csv, tmp_path, capsys):
    groups = tmp_path / "g.txt"
    groups.write_text("a: x0,x1\nb: x2\n")
    code, _, err = _screen(capsys, "--data", str(data_csv), "--label", "class",
                           "--measure", "mv", "--groups", str(groups))
    assert code == 2
    assert "MV requires univariate groups" in err


def test_grouped_gdc(data_csv, tmp_path, capsys):
    groups = tmp_path / "g.txt"
    groups.write_text("# pairs\na: x0,x1\nb: x2,x3\nc: x4,x5\n")
    code, out, _ = _screen(capsys, "--data", str(data_csv), "--label", "class",
                           "--groups", str(groups), "--top-d", "1")
    doc = json.loads(out)
    assert code == 0 and doc["selected"] == [1] and doc["groups"][1]["name"] == "b"


@pytest.mark.parametrize("argv", [
    ["--top-d", "0"],
    ["--top-d", "2", "--threshold-c", "0.1"],
    ["--kappa", "0.1"],
    ["--threshold-c", "0.1", "--kappa", "0.7"],
    ["--top-d", "99"],
    ["--threads", "0"],
])
def test_usage_errors_exit_2(data_csv, capsys, argv):
    code, _, err = _screen(capsys, "--data", str(data_csv), "--label", "class", *argv)
    assert code == 2 and err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["screen", "--data", "x.csv"])
    assert exc.value.code == 2


def test_data_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,y\n1,2,0\n3,oops,1\n")
    code, _, err = _screen(capsys, "--data", str(bad), "--label", "y")
    assert code == 1 and "line 3" in err
    code, _, _ = _screen(capsys, "--data", str(tmp_path / "missing.csv"), "--label", "y")
    assert code == 1
    one = tmp_path / "one.csv"
    one.write_text("a,y\n1,0\n2,0\n")
    assert _screen(capsys, "--data", str(one), "--label", "y")[0] == 1


def test_threads_do_not_change_numerics(data_csv, capsys, monkeypatch):
    docs = []
    for t in ("1", "2", "4"):
        code, out, _ = _screen(capsys, "--data", str(data_csv), "--label", "class", "--threads", t)
        docs.append(json.loads(out))
    monkeypatch.setenv("GDC_SCREEN_THREADS", "3")
    code, out, _ = _screen(capsys, "--data", str(data_csv), "--label", "class")
    env_doc = json.loads(out)
    assert env_doc["config"]["threads"] == 3
    docs.append(env_doc)
    for d in docs[1:]:
        assert d["groups"] == docs[0]["groups"]
        assert d["ranking"] == docs[0]["ranking"]


SIM = ["simulate", "--design", "lda", "--K", "3", "--n", "40", "--p", "30",
       "--reps", "3", "--seed", "7", "--measures", "gdc,r2"]


def test_simulate_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"]
    assert main(SIM + ["--format", "json", "--out", str(paths[0])]) == 0
    assert main(SIM + ["--format", "json", "--out", str(paths[1])]) == 0
    assert main(SIM + ["--format", "json", "--out", str(paths[2]), "--threads", "3"]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes() == paths[2].read_bytes()
    doc = json.loads(paths[0].read_text())
    jsonschema.validate(doc, _schema("simulation.schema.json"))
    assert [s["measure"] for s in doc["summaries"]] == ["gdc", "r2"]
    assert set(doc["summaries"][0]["p_l"]) == {"0", "1", "2"}


def test_simulate_csv_single_rep(capsys):
    argv = [a if a != "3" or i != SIM.index("--reps") + 1 else "1" for i, a in enumerate(SIM)]
    assert main(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("measure,mms_median,rsd")
    assert len(lines) == 3
    assert all(row.split(",")[2] == "0.0" for row in lines[1:])


def test_simulate_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("design = grouped\nn = 30\nr = 4\nreps = 2\nseed = 1\nmeasures = gdc,dt\n")
    assert main(["simulate", "--config", str(cfg), "--reps", "1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["spec"]["replicates"] == 1 and doc["spec"]["design"] == "grouped"


@pytest.mark.parametrize("argv", [
    ["simulate", "--design", "lda", "--n", "40", "--probs", "0.2,0.2"],
    ["simulate", "--design", "lda", "--n", "2"],
    ["simulate", "--design", "grouped", "--n", "40", "--measures", "mv"],
    ["simulate", "--n", "40"],
    ["simulate", "--design", "lda", "--n", "40", "--measures", "nope"],
])
def test_simulate_bad_parameters_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err
