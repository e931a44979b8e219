import json
import subprocess
import sys

import pytest

from zonopredict import SurrogateConfig, load_records, train


def run_harness(args, cwd):
    """Invoke the reachability harness CLI (the only coupling point)."""
    return subprocess.run([sys.executable, "-m", "zonoreach.cli"] + args,
                          cwd=cwd, capture_output=True, text=True)


@pytest.fixture(scope="session")
def exported_data(tmp_path_factory):
    """Training files exported by the harness: 590 chains -> 2008 pairs."""
    out = tmp_path_factory.mktemp("export")
    proc = run_harness(["export-training", "--chains", "590",
                        "--out", str(out)], cwd=str(out))
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def desk_artifact(exported_data, tmp_path_factory):
    """Desk-scale model on 2,000 pairs.

    60 epochs instead of the 200-epoch default keeps the suite under a
    few minutes; the width-error gate already holds at 60.
    """
    out = tmp_path_factory.mktemp("artifact")
    cfg = SurrogateConfig(epochs=60, samples=2000)
    records = load_records(str(exported_data / "train.jsonl"))
    train(cfg, records, str(out), log=lambda *a: None)
    return out


@pytest.fixture(scope="session")
def tiny_artifact(exported_data, tmp_path_factory):
    """Throwaway model for protocol and shape tests."""
    out = tmp_path_factory.mktemp("tiny")
    cfg = SurrogateConfig(d_model=32, heads=2, encoder_layers=1,
                          decoder_layers=1, ffn_width=64, epochs=1,
                          samples=64)
    records = load_records(str(exported_data / "train.jsonl"))
    train(cfg, records, str(out), log=lambda *a: None)
    return out


@pytest.fixture(scope="session")
def holdout_records(exported_data):
    return load_records(str(exported_data / "holdout.jsonl"))
