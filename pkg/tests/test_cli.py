import json
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ctfidf.cli import main

from conftest import write_config


class TestRun:
    def test_success_exit_zero(self, base_config, tmp_path, capsys):
        path = write_config(tmp_path, base_config)
        assert main(["run", "--config", str(path)]) == 0
        out = capsys.readouterr().out
        assert "f1=" in out
        assert (Path(base_config["outputDir"]) / "report.json").exists()

    def test_config_error_exit_two(self, base_config, tmp_path, capsys):
        base_config["split"]["trainFraction"] = 1.5
        path = write_config(tmp_path, base_config)
        assert main(["run", "--config", str(path)]) == 2
        assert "trainFraction" in capsys.readouterr().err

    def test_missing_dataset_exit_one(self, base_config, tmp_path, capsys):
        base_config["dataset"]["path"] = str(tmp_path / "absent.tsv")
        path = write_config(tmp_path, base_config)
        assert main(["run", "--config", str(path)]) == 1

    def test_flag_overrides(self, base_config, tmp_path):
        path = write_config(tmp_path, base_config)
        out = tmp_path / "override_out"
        code = main(["run", "--config", str(path),
                     "--weighting", "tfidf", "--reduce", "none",
                     "--model", "dtree", "--seed", "42",
                     "--train-frac", "0.6", "--folds", "2",
                     "--positive-label", "ham", "--out", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["weighting"] == "tfidf"
        assert report["config"]["reduce"]["enabled"] is False
        assert report["config"]["model"]["kind"] == "dtree"
        assert report["config"]["split"]["seed"] == 42
        assert report["config"]["split"]["trainFraction"] == 0.6
        assert report["config"]["cvFolds"] == 2
        assert report["positiveLabel"] == "ham"

    def test_k_override(self, base_config, tmp_path):
        path = write_config(tmp_path, base_config)
        out = tmp_path / "kout"
        assert main(["run", "--config", str(path), "--k", "17",
                     "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["effectiveK"] == 17


class TestStem:
    def test_json_payload(self, capsys):
        assert main(["stem", "You have WON a guaranteed prize"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["stems"] == ["won", "guarante", "prize"]


class TestExplainCli:
    def test_explain_flow(self, base_config, tmp_path, capsys):
        base_config["model"] = {"kind": "dtree"}
        base_config["reduce"] = {"enabled": False}
        base_config["cvFolds"] = 2
        path = write_config(tmp_path, base_config)
        assert main(["run", "--config", str(path)]) == 0
        capsys.readouterr()
        model = str(Path(base_config["outputDir"]) / "model.json")
        json_out = tmp_path / "rank.json"
        assert main(["explain", model, "--top", "3",
                     "--json", str(json_out)]) == 0
        ranking = json.loads(json_out.read_text())["ranking"]
        assert 0 < len(ranking) <= 3

    def test_svm_model_rejected(self, base_config, tmp_path, capsys):
        path = write_config(tmp_path, base_config)
        assert main(["run", "--config", str(path)]) == 0
        capsys.readouterr()
        model = str(Path(base_config["outputDir"]) / "model.json")
        assert main(["explain", model]) == 1


class TestCompareCli:
    def test_two_configs(self, base_config, tmp_path, capsys):
        a = write_config(tmp_path, base_config, "a.json")
        cfg2 = dict(base_config)
        cfg2["weighting"] = "tfidf"
        cfg2["outputDir"] = str(tmp_path / "out_b")
        b = write_config(tmp_path, cfg2, "b.json")
        json_out = tmp_path / "cmp.json"
        assert main(["compare", str(a), str(b), "--json", str(json_out)]) == 0
        rows = json.loads(json_out.read_text())
        assert len(rows) == 2

    def test_single_config_is_config_error(self, base_config, tmp_path,
                                            capsys):
        a = write_config(tmp_path, base_config)
        assert main(["compare", str(a)]) == 2


class TestSvdCheck:
    def test_pass_on_random_matrix(self, tmp_path, capsys):
        from scipy.io import mmwrite

        A = sp.random(80, 60, density=0.1,
                      random_state=np.random.RandomState(0), format="csr")
        A.data += 0.5
        path = tmp_path / "matrix.mtx"
        mmwrite(str(path), A)
        assert main(["svd-check", str(path), "--k", "5"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "dense oracle" in out
