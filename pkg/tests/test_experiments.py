import pytest

from shmww import experiments as ex
from shmww.params import PARA1, PARA2, SMALL, TOY


def test_spec_validation():
    ex.ExperimentSpec("bias", TOY, [10], trials=1)
    with pytest.raises(ValueError):
        ex.ExperimentSpec("plots", TOY)
    with pytest.raises(ValueError):
        ex.ExperimentSpec("bias", TOY, trials=0)
    with pytest.raises(ValueError):
        ex.ExperimentSpec("bias", TOY, [0])


def test_default_workers(monkeypatch):
    monkeypatch.setenv("SHMWW_THREADS", "3")
    assert ex.default_workers() == 3
    monkeypatch.delenv("SHMWW_THREADS")
    assert ex.default_workers() >= 1


def test_bias_rows():
    rows = ex.run_bias_experiment(SMALL, 300, seed=1)
    assert len(rows) == SMALL.n
    assert list(rows[0]) == ex.BIAS_HEADER
    assert sum(r["label"] == "random" for r in rows) == SMALL.n_random
    s = ex.bias_summary(rows)
    assert abs(s["mean_random"] - 0.5) < 0.02
    assert s["min_random"] > s["max_identity"]
    assert rows == ex.run_bias_experiment(SMALL, 300, seed=1)
    with pytest.raises(ValueError):
        ex.run_bias_experiment(SMALL, 0)


def test_bias_raw_challenge_matches_hashed_statistics():
    a = ex.bias_summary(ex.run_bias_experiment(SMALL, 400, seed=2))
    b = ex.bias_summary(ex.run_bias_experiment(SMALL, 400, seed=2, raw_challenge=True))
    assert abs(a["mean_identity"] - b["mean_identity"]) < 0.02


def test_confidence_rows_are_deterministic():
    rows = ex.run_confidence_experiment(SMALL, [40, 20], trials=4, seed=5)
    assert [r["N"] for r in rows] == [20, 40]
    assert all(list(r) == ex.CONFIDENCE_HEADER for r in rows)
    assert all(0 <= r["alpha_empirical"] <= 1 and r["trials"] == 4 for r in rows)
    again = ex.run_confidence_experiment(SMALL, [20, 40], trials=4, seed=5, workers=2)
    assert rows == again
    with pytest.raises(ValueError):
        ex.run_confidence_experiment(SMALL, [20], trials=0)


def test_confidence_explicit_delta():
    rows = ex.run_confidence_experiment(SMALL, [50], trials=2, deltas={50: 0.35})
    assert rows[0]["delta"] == 0.35 and rows[0]["tau"] == 17


def test_nstar_rows():
    rows = ex.run_nstar([PARA1, PARA2], 0.9, deltas={"para1": 0.3005, "para2": 0.3015})
    assert [r["n_star"] for r in rows] == [243, 255]
    assert all(r["alpha_at_n_star"] >= 0.9 for r in rows)
    assert rows[0]["log2_attack_bound"] <= 48 and rows[1]["log2_attack_bound"] <= 52


def test_attack_trial_and_timing():
    report = ex.run_attack_trial(SMALL, 64, seed=3)
    assert report.success and report.key_equal
    rows = ex.run_attack_timing(SMALL, [48, 64], trials=2, seed=1)
    assert [r["N"] for r in rows] == [48, 64]
    assert all(list(r) == ex.TIMING_HEADER for r in rows)
    assert all(r["min_seconds"] <= r["avg_seconds"] <= r["max_seconds"] for r in rows)
    with pytest.raises(ValueError):
        ex.run_attack_timing(SMALL, [64], trials=0)


def test_primitive_bench():
    rows = ex.run_primitive_bench(PARA1, 3, seed=0)
    times = {r["operation"]: r for r in rows}
    assert set(times) == {"keygen", "sign", "verify"}
    assert all(r["mean_ms"] > 0 and r["stdev_ms"] >= 0 for r in rows)
    assert times["sign"]["mean_ms"] < times["keygen"]["mean_ms"]
    with pytest.raises(ValueError):
        ex.run_primitive_bench(TOY, 0)


def test_write_csv(tmp_path):
    path = tmp_path / "x.csv"
    ex.write_csv([{"a": 1, "b": 2}], path)
    assert path.read_text().splitlines() == ["a,b", "1,2"]
