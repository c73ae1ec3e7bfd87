import csv
import json
from fractions import Fraction

import pytest

from ergolab.bernoulli import BudgetError
from ergolab.harness import ConfigError, fmt, load_config, replay_check, resolve_threads, run, validate_config

ENTROPY = {"kind": "entropy-ledger", "seeds": [0], "alpha": {"n": 3},
           "subrelations": [{"beta": 2.609437912434, "index": 2}],
           "restrictions": [{"beta": 2.609437912434, "muY": "1/4"}],
           "thm5": {"n": 3, "m": [1, 10]}}
SWEEP = {"kind": "sweep", "window": {"type": "grid", "dims": [16, 16]},
         "pGrid": {"start": 0.3, "stop": 0.7, "num": 5}, "seeds": [1, 2]}
PROBE = {"kind": "interval-probe", "rank": 3, "radius": 3, "p": [0.2, 0.4], "seeds": [1, 2, 3],
         "sizeThreshold": 20, "many": 2}


def _digests(res):
    return dict(res.manifest.files)


@pytest.mark.parametrize("cfg,path", [
    ({"kind": "sweep", "seeds": [1], "window": {"type": "grid", "dims": [8, 8]}, "pGrid": "x"}, "$.pGrid"),
    ({"kind": "nope", "seeds": [1]}, "$.kind"),
    ({"kind": "interval-probe", "seeds": [1, "a"], "rank": 3, "radius": 2, "p": 0.1}, "$.seeds[1]"),
    ({"kind": "interval-probe", "seeds": [1], "rank": 3, "radius": 2}, "$"),
])
def test_schema_errors_name_the_field(cfg, path):
    with pytest.raises(ConfigError) as ei:
        validate_config(cfg)
    assert ei.value.path == path


def test_invalid_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError) as ei:
        load_config(p)
    assert ei.value.path == "$"


def test_fmt():
    assert fmt(None) == "" and fmt(True) == "true" and fmt(3) == "3"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(Fraction(1, 4)) == "0.25"
    assert fmt(float("inf")) == "inf"


def test_missing_output_dir():
    with pytest.raises(ConfigError, match="outputDir"):
        run(ENTROPY)


def test_entropy_run_and_replay(tmp_path):
    res = run(ENTROPY, tmp_path / "a")
    assert "2.609438" in res.result.table()
    assert set(res.manifest.files) == {"ledger.csv", "ledger.json"}
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["rngId"] == "splitmix64-v1" and man["kind"] == "entropy-ledger"
    assert replay_check(tmp_path / "a", rerun=True)


def test_replay_detects_edits(tmp_path):
    run(ENTROPY, tmp_path)
    with open(tmp_path / "ledger.csv", "a") as fh:
        fh.write("tampered\n")
    rep = replay_check(tmp_path)
    assert not rep and rep.mismatches == [("ledger.csv", "digest mismatch")]


def test_replay_missing(tmp_path):
    rep = replay_check(tmp_path / "absent")
    assert not rep and rep.mismatches[0][1] == "missing"


def test_sweep_double_run_is_byte_identical(tmp_path):
    a = run(SWEEP, tmp_path / "a")
    b = run(SWEEP, tmp_path / "b", threads=2)
    assert _digests(a) == _digests(b)
    assert {"sweep.csv", "summary.csv", "sweep.svg"} <= set(a.manifest.files)
    raw = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert b"\r\n" not in raw


def test_seed_offset_changes_seeds(tmp_path):
    a = run(PROBE, tmp_path / "a")
    b = run(PROBE, tmp_path / "b", seed_offset=100)
    assert [e["seed"] for e in b.manifest.seed_ledger] == [e["seed"] + 100 for e in a.manifest.seed_ledger]
    c = run({**PROBE, "seeds": [101, 102, 103]}, tmp_path / "c")
    assert (tmp_path / "b" / "probe.csv").read_bytes() == (tmp_path / "c" / "probe.csv").read_bytes()


def test_probe_csv_columns(tmp_path):
    run(PROBE, tmp_path)
    with open(tmp_path / "probe.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["p", "seed", "bigClusters", "largest"] and len(rows) == 6
    doc = json.loads((tmp_path / "interval.json").read_text())
    assert doc["n"] == 3 and len(doc["probes"]) == 2


def test_threads_env(monkeypatch):
    monkeypatch.setenv("ERGOLAB_THREADS", "3")
    assert resolve_threads(None) == 3 and resolve_threads(1) == 1
    monkeypatch.delenv("ERGOLAB_THREADS")
    assert resolve_threads(None) == 1


def test_budget(tmp_path):
    cfg = {"kind": "coinduce", "seeds": [0], "budget": 4,
           "instance": {"group": [[1, 0]], "orbitsPerClass": 2, "classes": 1, "alphaImages": [[1, 0, 3, 2]]}}
    with pytest.raises(BudgetError):
        run(cfg, tmp_path)


def test_coinduce_and_extension_suites(tmp_path):
    cfg = {"kind": "coinduce", "seeds": [0],
           "instance": {"group": [[1, 0]], "orbitsPerClass": 2, "classes": 1, "alphaImages": [[1, 0, 3, 2]]}}
    rows = run(cfg, tmp_path / "c").result
    assert rows[0][2] == 2 and all(rows[0][5:8])
    ext = run({"kind": "extension-suite", "seeds": [0, 1, 2]}, tmp_path / "e").result
    assert all(r[5] and r[7] and r[9] and r[10] for r in ext)


def test_spectral_tree(tmp_path):
    cfg = {"kind": "spectral", "window": {"type": "tree", "degree": 3, "radius": 3},
           "radii": [3, 5], "samples": 20, "seeds": [0]}
    rows = run(cfg, tmp_path).result
    assert all(r[7] for r in rows)
    assert rows[1][3] < 2 * 2 ** 0.5
