"""Command-line workflow tests: every subcommand, exit codes, artifacts."""

import json
import os

import numpy as np
import pytest

from hdmrnet.cli import main


def run(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A synthetic dataset plus one fitted model, shared across tests."""
    root = tmp_path_factory.mktemp("cli")
    data = str(root / "pair.csv")
    model = str(root / "pair.model")
    assert run("synth", "--kind", "pairwise", "--dim", "3", "--n", "400",
               "--seed", "1", "--out", data) == 0
    assert run("fit", "--data", data, "--d", "2", "--n-per-term", "5",
               "--l", "0.3", "--train", "200", "--seed", "7",
               "--out", model) == 0
    return root, data, model


def test_synth_writes_config_echo(workspace):
    _, data, _ = workspace
    lines = open(data).read().splitlines()
    assert lines[0].startswith("# config: ")
    config = json.loads(lines[0][len("# config: ") :])
    assert config["command"] == "synth" and config["seed"] == 1
    assert lines[1] == "x1,x2,x3,target"
    assert len(lines) == 2 + 400


def test_fit_writes_model_and_report(workspace):
    root, _, model = workspace
    report = json.load(open(model + ".report.json"))
    assert report["config"]["command"] == "fit"
    assert report["n_train"] == 200 and report["n_test"] == 200
    assert report["train_rmse"] <= report["test_rmse"]
    assert report["test_corr"] > 0.99
    doc = json.load(open(model))
    assert doc["format_version"] == 1
    assert doc["metadata"]["config"]["seed"] == 7


def test_eval_reproduces_fit_report_bit_exactly(workspace, capsys):
    _, data, model = workspace
    assert run("eval", "--model", model, "--data", data,
               "--train", "200", "--seed", "7") == 0
    evaluated = json.loads(capsys.readouterr().out)
    report = json.load(open(model + ".report.json"))
    for key in ("train_rmse", "test_rmse", "train_corr", "test_corr"):
        assert evaluated[key] == report[key]


def test_eval_without_split_uses_all_rows(workspace, capsys):
    _, data, model = workspace
    assert run("eval", "--model", model, "--data", data) == 0
    evaluated = json.loads(capsys.readouterr().out)
    assert evaluated["n"] == 400
    assert evaluated["rmse"] >= 0


def test_predict_round_trip(workspace, tmp_path):
    root, data, model = workspace
    points = str(tmp_path / "pts.csv")
    open(points, "w").write("0.1,0.2,0.3\n0.9,0.8,0.7\n")
    out = str(tmp_path / "preds.csv")
    assert run("predict", "--model", model, "--data", points, "--out", out) == 0
    lines = open(out).read().splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "x1,x2,x3,prediction"
    values = [float(c) for c in lines[2].split(",")]
    # pairwise target at (0.1, 0.2, 0.3) is 0.11; the surrogate is close
    assert values[:3] == [0.1, 0.2, 0.3]
    assert abs(values[3] - 0.11) < 0.05


def test_predict_empty_input_succeeds(workspace, tmp_path):
    _, _, model = workspace
    points = str(tmp_path / "empty.csv")
    open(points, "w").write("# nothing\n")
    out = str(tmp_path / "preds.csv")
    assert run("predict", "--model", model, "--data", points, "--out", out) == 0
    lines = open(out).read().splitlines()
    assert lines[-1] == "x1,x2,x3,prediction"


def test_predict_dimension_mismatch_exit_code(workspace, tmp_path, capsys):
    _, _, model = workspace
    points = str(tmp_path / "wide.csv")
    open(points, "w").write("0.1,0.2,0.3,0.4\n")
    assert run("predict", "--model", model, "--data", points,
               "--out", str(tmp_path / "p.csv")) == 5
    assert "error:" in capsys.readouterr().err


def test_components_single_file(workspace, tmp_path):
    _, _, model = workspace
    out = str(tmp_path / "curves.csv")
    assert run("components", "--model", model, "--grid", "11", "--out", out) == 0
    lines = open(out).read().splitlines()
    assert lines[1] == "term,grid,value"
    body = [line.split(",") for line in lines[2:]]
    terms = {row[0] for row in body}
    # 3 original terms + 3 subsets x 5 neurons
    assert len(terms) == 18
    assert {"x1", "x2", "x3"} <= terms
    assert len(body) == 18 * 11


def test_components_directory_mode(workspace, tmp_path):
    _, _, model = workspace
    out = str(tmp_path / "curves") + os.sep
    assert run("components", "--model", model, "--out", out) == 0
    files = sorted(os.listdir(out))
    assert len(files) == 18
    assert "term_x1.csv" in files


def test_sweep_artifacts_and_determinism(workspace, tmp_path):
    _, data, _ = workspace
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    argv = ["sweep", "--data", data, "--d", "1,2", "--n-per-term", "4",
            "--repeats", "2", "--train", "150", "--test", "100",
            "--l", "0.3", "--seed", "5"]
    assert run(*argv, "--out-dir", out_a) == 0
    assert run(*argv, "--out-dir", out_b, "--jobs", "2") == 0

    def strip_wall(path):
        # drop the config comment (echoes --out-dir) and blank the timing cell
        lines = open(path).read().splitlines()
        idx = lines[1].split(",").index("wall_s")
        body = []
        for line in lines[2:]:
            cells = line.split(",")
            cells[idx] = "_"
            body.append(",".join(cells))
        return lines[1], body

    assert strip_wall(os.path.join(out_a, "sweep.csv")) == strip_wall(
        os.path.join(out_b, "sweep.csv")
    )
    config_a = json.loads(
        open(os.path.join(out_a, "sweep.csv")).readline()[len("# config: ") :]
    )
    config_b = json.loads(
        open(os.path.join(out_b, "sweep.csv")).readline()[len("# config: ") :]
    )
    config_a["out_dir"] = config_b["out_dir"] = "_"
    assert config_a == config_b  # --jobs never appears in the echo
    summary_a = open(os.path.join(out_a, "summary.csv")).read().splitlines()[1:]
    summary_b = open(os.path.join(out_b, "summary.csv")).read().splitlines()[1:]
    assert summary_a == summary_b
    assert summary_a[0] == "d,N,best_test_rmse"


def test_model_files_are_bit_identical_across_runs(workspace, tmp_path):
    _, data, _ = workspace
    out = str(tmp_path / "twice.model")
    argv = ("fit", "--data", data, "--d", "2", "--n-per-term", "5",
            "--l", "0.3", "--train", "200", "--seed", "7", "--out", out)
    assert run(*argv) == 0
    first = open(out, "rb").read()
    assert run(*argv) == 0
    assert open(out, "rb").read() == first


def test_usage_errors_exit_two(workspace):
    _, data, _ = workspace
    with pytest.raises(SystemExit) as info:
        run("fit", "--data", data, "--d", "2", "--n-per-term", "5",
            "--seed", "1", "--out", "/tmp/x.model")  # --l missing
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run("eval", "--model", "m", "--data", data, "--train", "10")  # no seed
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run("sweep", "--data", data, "--d", "1,x", "--n-per-term", "2",
            "--train", "10", "--l", "0.3", "--seed", "1", "--out-dir", "/tmp/s")
    assert info.value.code == 2


def test_order_exceeding_dimension_exit_code(workspace, tmp_path, capsys):
    _, data, _ = workspace
    code = run("fit", "--data", data, "--d", "7", "--n-per-term", "2",
               "--l", "0.3", "--seed", "1",
               "--out", str(tmp_path / "x.model"))
    assert code == 5
    assert "order" in capsys.readouterr().err


def test_data_errors_exit_three(workspace, tmp_path, capsys):
    _, data, model = workspace
    assert run("eval", "--model", model, "--data", data, "--target", "Q") == 3
    assert "no column named" in capsys.readouterr().err
    assert run("fit", "--data", str(tmp_path / "absent.csv"), "--d", "1",
               "--n-per-term", "0", "--l", "0.3", "--seed", "1",
               "--out", str(tmp_path / "x.model")) == 3
    broken = str(tmp_path / "broken.model")
    open(broken, "w").write("{}")
    assert run("predict", "--model", broken, "--data", data,
               "--out", str(tmp_path / "p.csv")) == 3


def test_numeric_errors_exit_four(workspace, tmp_path, capsys):
    _, data, _ = workspace
    code = run("fit", "--data", data, "--d", "2", "--n-per-term", "2",
               "--l", "-0.5", "--seed", "1",
               "--out", str(tmp_path / "x.model"))
    assert code == 4
    assert "length scale" in capsys.readouterr().err


def test_failed_fit_leaves_no_model_file(workspace, tmp_path):
    _, data, _ = workspace
    target = str(tmp_path / "never.model")
    assert run("fit", "--data", data, "--d", "7", "--n-per-term", "2",
               "--l", "0.3", "--seed", "1", "--out", target) == 5
    assert not os.path.exists(target)
    assert not os.path.exists(target + ".report.json")
