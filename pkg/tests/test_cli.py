import csv
import subprocess
import sys

import pytest

from zonempc.harness.cli import build_parser, main


@pytest.fixture(scope="module")
def workflow(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["collect", "--months", "1", "--seed", "3", "--out", str(d / "data.csv")]) == 0
    assert main(["train", "--data", str(d / "data.csv"), "--models", "2", "--epochs", "1", "--seed", "3",
                 "--out", str(d / "ens")]) == 0
    return d


def test_collect_and_train_outputs(workflow):
    with open(workflow / "data.csv") as fh:
        assert sum(1 for _ in fh) == 2977
    assert (workflow / "ens" / "model_1.txt").exists()
    with open(workflow / "ens" / "loss_curves.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 2


def test_run_flags_override_config_file(workflow, capsys):
    cfg = workflow / "run.cfg"
    cfg.write_text(f"controller = cem\nsamples = 500\nhorizon = 2\ncem_iters = 1\nupdate-period = 0\n"
                   f"ensemble = {workflow / 'ens'}\nseed = 3\nout = {workflow / 'ignored'}\n")
    out = workflow / "run"
    assert main(["run", "--config", str(cfg), "--samples", "4", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "wrote 2976 rows" in text and "violation_rate = " in text
    run_cfg = (out / "run.cfg").read_text()
    assert "samples = 4" in run_cfg and "controller = cem" in run_cfg
    assert not (workflow / "ignored").exists()


def test_evaluate_uses_run_config(workflow, capsys):
    out = workflow / "rule"
    assert main(["run", "--controller", "rule", "--seed", "3", "--out", str(out)]) == 0
    run_text = capsys.readouterr().out
    assert main(["evaluate", "--results", str(out / "results.csv")]) == 0
    eval_text = capsys.readouterr().out
    pick = lambda t: [l for l in t.splitlines() if l.startswith("violation_rate")]
    assert pick(run_text) == pick(eval_text)


def test_compare_from_config_file(workflow, capsys):
    cmp_cfg = workflow / "cmp.cfg"
    cmp_cfg.write_text(f"controllers = rule, rs\nensemble = {workflow / 'ens'}\nseed = 3\nsamples = 4\nhorizon = 2\n"
                    f"update_period = 0\nout = {workflow / 'cmp'}\n")
    assert main(["compare", "--spec", str(cmp_cfg)]) == 0
    assert "savings=" in capsys.readouterr().out
    with open(workflow / "cmp" / "comparison.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["kind"] for r in rows] == ["data", "data", "delta_pct"]


def test_bad_input_exits_with_code_2(tmp_path, capsys):
    assert main(["run", "--controller", "mppi", "--out", str(tmp_path)]) == 2
    assert "needs a trained ensemble" in capsys.readouterr().err
    assert main(["evaluate", "--results", str(tmp_path / "missing.csv")]) == 2


def test_parser_rejects_unknown_controller():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["run", "--controller", "ppo"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zonempc", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("collect", "train", "run", "evaluate", "compare"):
        assert cmd in proc.stdout
