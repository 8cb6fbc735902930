import json
from pathlib import Path

import pytest

from ctfidf.synth import generate_corpus, write_tsv

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def synth_tsv(tmp_path_factory):
    """A deterministic 600-message synthetic corpus on disk."""
    path = tmp_path_factory.mktemp("synth") / "synth.tsv"
    write_tsv(str(path), generate_corpus(400, 200, seed=11))
    return path


@pytest.fixture()
def base_config(synth_tsv, tmp_path):
    return {
        "dataset": {"path": str(synth_tsv)},
        "weighting": "ctfidf",
        "reduce": {"enabled": True, "k": 40},
        "model": {"kind": "svm"},
        "split": {"trainFraction": 0.7, "seed": 3},
        "cvFolds": 3,
        "positiveLabel": "spam",
        "outputDir": str(tmp_path / "out"),
    }


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=1), encoding="utf-8")
    return path
