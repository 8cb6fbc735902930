import json
from pathlib import Path

import numpy as np
import pytest

from ctfidf.exceptions import ConfigError, UnsupportedModelError
from ctfidf.pipeline import (
    compare,
    comparison_table,
    config_from_dict,
    explain,
    load_config,
    run_experiment,
)

from conftest import write_config


VOLATILE = ("trainTimeMs", "reduceTimeMs", "timestamp", "machine",
            "svdRestarts")


def scrub(report_dict):
    d = dict(report_dict)
    for key in VOLATILE:
        d.pop(key, None)
    return d


class TestConfig:
    def test_defaults_materialized(self, base_config, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config))
        snap = cfg.resolved()
        assert snap["minDocFreq"] == 1
        assert snap["preprocess"]["removeNumbers"] is False
        assert snap["split"]["stratified"] is True
        assert len(snap["preprocess"]["stopwordHash"]) == 64

    def test_invalid_train_fraction_names_field(self, base_config, tmp_path):
        base_config["split"]["trainFraction"] = 1.5
        with pytest.raises(ConfigError) as err:
            load_config(write_config(tmp_path, base_config))
        assert "trainFraction" in str(err.value)

    def test_unknown_key_rejected(self, base_config, tmp_path):
        base_config["weigthing"] = "tfidf"
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, base_config))

    def test_bad_weighting(self, base_config):
        base_config["weighting"] = "bm25"
        cfg = config_from_dict(base_config)
        with pytest.raises(ConfigError):
            cfg.validate()

    def test_ctf_dense_requires_ctfidf(self, base_config):
        base_config["weighting"] = "tfidf"
        base_config["ctfDense"] = True
        with pytest.raises(ConfigError):
            config_from_dict(base_config).validate()

    def test_relative_dataset_path_resolved(self, base_config, tmp_path):
        src = Path(base_config["dataset"]["path"])
        local = tmp_path / "corpus.tsv"
        local.write_bytes(src.read_bytes())
        base_config["dataset"]["path"] = "corpus.tsv"
        cfg = load_config(write_config(tmp_path, base_config))
        assert Path(cfg.dataset.path).is_absolute()
        assert Path(cfg.dataset.path).exists()


class TestRunExperiment:
    def test_artifacts_written(self, base_config, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config))
        report = run_experiment(cfg)
        out = Path(cfg.output_dir)
        for name in ("report.json", "model.json", "vocab.json", "factors.bin"):
            assert (out / name).exists(), name
        assert 0.0 <= report.metric.f1 <= 1.0
        assert report.train_time_ms >= 0
        assert report.reduce_time_ms is not None

    def test_no_factors_without_reduce(self, base_config, tmp_path):
        base_config["reduce"] = {"enabled": False}
        base_config["outputDir"] = str(tmp_path / "plain")
        cfg = load_config(write_config(tmp_path, base_config))
        report = run_experiment(cfg)
        assert not (Path(cfg.output_dir) / "factors.bin").exists()
        assert report.reduce_time_ms is None

    def test_metrics_consistent_with_confusion(self, base_config, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config))
        report = run_experiment(cfg)
        d = report.to_dict()
        c = d["confusion"]
        tp, fp, fn, tn = c["tp"], c["fp"], c["fn"], c["tn"]
        assert tp + fp + fn + tn == d["testSize"]
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        assert d["precision"] == pytest.approx(precision)
        assert d["recall"] == pytest.approx(recall)
        if precision + recall:
            assert d["f1"] == pytest.approx(
                2 * precision * recall / (precision + recall))

    def test_determinism_modulo_volatile_fields(self, base_config, tmp_path):
        cfg_path = write_config(tmp_path, base_config)
        a = run_experiment(load_config(cfg_path)).to_dict()
        base_config["outputDir"] = str(tmp_path / "out2")
        b = run_experiment(load_config(write_config(tmp_path, base_config,
                                                    "c2.json"))).to_dict()
        a["config"].pop("outputDir")
        b["config"].pop("outputDir")
        assert scrub(a) == scrub(b)

    def test_report_json_stable_bytes(self, base_config, tmp_path):
        cfg_path = write_config(tmp_path, base_config)
        run_experiment(load_config(cfg_path))
        first = json.loads((Path(base_config["outputDir"]) / "report.json")
                           .read_text())
        run_experiment(load_config(cfg_path))
        second = json.loads((Path(base_config["outputDir"]) / "report.json")
                            .read_text())
        assert scrub(first) == scrub(second)
        assert list(first) == list(second)  # stable field order

    def test_label_mapping_through_config(self, tmp_path):
        rows = [("ham", "hello there friend"), ("junk", "win cash prize"),
                ("smish", "click this link now"), ("ham", "see you at lunch"),
                ("junk", "free entry claim prize"), ("smish", "urgent reply"),
                ("ham", "movie tonight"), ("junk", "cash bonus offer")]
        data = tmp_path / "mixed.tsv"
        data.write_text("\n".join(f"{l}\t{t}" for l, t in rows) + "\n")
        cfg = config_from_dict({
            "dataset": {"path": str(data),
                        "labelMapping": {"junk": "spam", "smish": "spam"}},
            "reduce": {"enabled": False},
            "model": {"kind": "svm"},
            "split": {"trainFraction": 0.5, "seed": 0},
            "cvFolds": 2,
            "outputDir": str(tmp_path / "out"),
        })
        report = run_experiment(cfg)
        assert report.to_dict()["labelCounts"] == {"ham": 3, "spam": 5}

    def test_vocab_json_pairs_weighting(self, base_config, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config))
        run_experiment(cfg)
        vocab = json.loads((Path(cfg.output_dir) / "vocab.json").read_text())
        assert len(vocab["terms"]) == len(vocab["docFreq"])
        assert vocab["weighting"]["scheme"] == "ctfidf"
        assert len(vocab["weighting"]["idf"]) == len(vocab["terms"])
        assert vocab["weighting"]["nDocs"] == vocab["nDocs"]

    def test_dataset_fingerprint_tracks_content(self, base_config, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config))
        r1 = run_experiment(cfg)
        import hashlib
        expect = hashlib.sha256(
            Path(base_config["dataset"]["path"]).read_bytes()).hexdigest()
        assert r1.dataset_fingerprint == expect


class TestExplain:
    def make_tree_run(self, base_config, tmp_path, reduce_enabled=False):
        base_config["model"] = {"kind": "dtree"}
        base_config["reduce"] = {"enabled": reduce_enabled, "k": 20}
        base_config["cvFolds"] = 2
        base_config["outputDir"] = str(tmp_path / "treeout")
        cfg = load_config(write_config(tmp_path, base_config, "tree.json"))
        run_experiment(cfg)
        return Path(cfg.output_dir) / "model.json"

    def test_term_tree_ranking(self, base_config, tmp_path):
        model_path = self.make_tree_run(base_config, tmp_path)
        report = explain(model_path, top_n=5)
        assert 0 < len(report.ranking) <= 5
        names = [n for n, _ in report.ranking]
        assert all(isinstance(n, str) for n in names)
        values = [v for _, v in report.ranking]
        assert values == sorted(values, reverse=True)

    def test_top_zero_empty(self, base_config, tmp_path):
        model_path = self.make_tree_run(base_config, tmp_path)
        assert explain(model_path, top_n=0).ranking == ()

    def test_svm_unsupported(self, base_config, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config))
        run_experiment(cfg)
        with pytest.raises(UnsupportedModelError, match="decision tree"):
            explain(Path(cfg.output_dir) / "model.json", top_n=5)

    def test_reduced_tree_unsupported(self, base_config, tmp_path):
        model_path = self.make_tree_run(base_config, tmp_path,
                                        reduce_enabled=True)
        with pytest.raises(UnsupportedModelError, match="reduced"):
            explain(model_path, top_n=5)


class TestCompare:
    def test_requires_two_configs(self, base_config, tmp_path):
        path = write_config(tmp_path, base_config)
        with pytest.raises(ConfigError):
            compare([str(path)])

    def test_four_variant_table(self, base_config, tmp_path):
        paths = []
        for i, (scheme, reduced) in enumerate(
                [("tfidf", False), ("ctfidf", False),
                 ("tfidf", True), ("ctfidf", True)]):
            cfg = dict(base_config)
            cfg["weighting"] = scheme
            cfg["reduce"] = {"enabled": reduced, "k": 30}
            cfg["model"] = {"kind": "svm"}
            cfg["outputDir"] = str(tmp_path / f"v{i}")
            paths.append(str(write_config(tmp_path, cfg, f"v{i}.json")))
        rows = compare(paths)
        assert len(rows) == 4
        assert [r["weighting"] for r in rows] == ["tfidf", "ctfidf",
                                                  "tfidf", "ctfidf"]
        assert [r["reduction"] for r in rows] == ["none", "none",
                                                  "irlba", "irlba"]
        assert all(r["error"] is None for r in rows)
        table = comparison_table(rows)
        assert table.count("\n") == 5  # header + rule + 4 rows
        for col in ("precision", "recall", "f1", "train"):
            assert col in table.splitlines()[0]

    def test_failed_row_marked(self, base_config, tmp_path):
        good = write_config(tmp_path, base_config, "good.json")
        bad_cfg = dict(base_config)
        bad_cfg["dataset"] = {"path": str(tmp_path / "missing.tsv")}
        bad = write_config(tmp_path, bad_cfg, "bad.json")
        rows = compare([str(good), str(bad)])
        assert rows[0]["error"] is None
        assert rows[1]["error"]
        assert "FAILED" in comparison_table(rows)
