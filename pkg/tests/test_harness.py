import csv
import json

import pytest

from cssmaxsat import harness
from cssmaxsat.errors import ConfigError


def small_config(tmp_path, **kw):
    base = dict(code="rotated-surface", p=[0.05, 0.1], distances=[3], trials=40, seed=3, output=str(tmp_path / "out.jsonl"))
    base.update(kw)
    return harness.ExperimentConfig(**base)


def test_wilson_interval():
    lo, hi = harness.wilson_interval(10, 100)
    assert lo < 0.1 < hi
    assert harness.wilson_interval(0, 50)[0] == 0.0
    assert harness.wilson_interval(50, 50)[1] == 1.0


def test_sweep_and_resume(tmp_path):
    cfg = small_config(tmp_path)
    recs = harness.mc_sweep(cfg)
    assert len(recs) == 2
    assert all(r.trials == 40 and 0 <= r.p_L <= 1 for r in recs)
    assert all(r.ci_low <= r.p_L <= r.ci_high for r in recs)
    lines = (tmp_path / "out.jsonl").read_text().splitlines()
    assert len(lines) == 2
    again = harness.mc_sweep(small_config(tmp_path, p=[0.05, 0.1, 0.15]))
    assert [r.failures for r in again[:2]] == [r.failures for r in recs]
    assert len((tmp_path / "out.jsonl").read_text().splitlines()) == 3


def test_sweep_deterministic(tmp_path):
    a = harness.mc_sweep(small_config(tmp_path, output=None, timing=False))
    b = harness.mc_sweep(small_config(tmp_path, output=None, timing=False))
    assert [r.to_json() for r in a] == [r.to_json() for r in b]


def test_oracle_and_spacetime(tmp_path):
    cfg = small_config(tmp_path, engine="oracle", output=None, p=[0.1])
    rec = harness.mc_sweep(cfg)[0]
    emb = harness.mc_sweep(small_config(tmp_path, output=None, p=[0.1]))[0]
    assert rec.failures == emb.failures
    st = harness.mc_sweep(small_config(tmp_path, output=None, p=[0.03], q=[0.03], L="d", trials=10))[0]
    assert st.L == 3


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        small_config(tmp_path, trials=0).validate()
    with pytest.raises(ConfigError):
        small_config(tmp_path, p=[1.5]).validate()
    with pytest.raises(ConfigError):
        small_config(tmp_path, engine="oracle", L=2).validate()
    with pytest.raises(ConfigError):
        harness.ExperimentConfig.from_dict({"code": "toric", "p": [0.1], "colour": 1})


def test_export(tmp_path):
    recs = harness.mc_sweep(small_config(tmp_path))
    harness.export(recs, tmp_path / "r.csv", "csv")
    rows = list(csv.DictReader(open(tmp_path / "r.csv")))
    assert list(rows[0]) == harness.CSV_COLUMNS
    assert len(rows) == 2
    harness.export(recs, tmp_path / "r.jsonl")
    assert json.loads((tmp_path / "r.jsonl").read_text().splitlines()[0])["code"] == "rotated-surface-3"
    curves = harness.curves_by_distance(recs)
    assert list(curves[3][0]) == [0.05, 0.1]
