import json

from gwp.config import reset_config
from gwp.metrics import MetricsDB, RunMetrics, get_metrics_db


def record_runs(db):
    for verdict, latency in (("trivial", 5), ("nontrivial", 1500), ("trivial", 2500)):
        run = RunMetrics.start("wp", "a5", "s s s s s")
        run.finish(verdict=verdict, output_size=1)
        run._start_time -= latency / 1000
        db.record(run)
    failed = RunMetrics.start("cwp", "a5", "start S")
    failed.finish(error="line 2: expected '<variable> -> <tokens>'")
    db.record(failed)


def test_run_metrics_digest():
    run = RunMetrics.start("slp length", None, "start S\nS -> a\n")
    assert len(run.input_digest) == 16
    assert run.input_size == len("start S\nS -> a\n")
    assert RunMetrics.start("x", None, "abc").input_digest == run.start("y", None, "abc").input_digest
    assert run.latency_ms >= 0


def test_stats_and_slow_runs():
    db = get_metrics_db()
    record_runs(db)
    stats = db.get_stats()
    assert stats["total_runs"] == 4
    assert stats["trivial_count"] == 2
    assert stats["nontrivial_count"] == 1
    assert stats["error_count"] == 1
    assert stats["by_command"] == {"wp": 3, "cwp": 1}
    slow = db.get_slow_runs(threshold_ms=1000)
    assert len(slow) == 1
    assert slow[0]["count"] == 2
    assert slow[0]["group_name"] == "a5"


def test_snapshots():
    db = get_metrics_db()
    first = db.save_snapshot("before")
    record_runs(db)
    second = db.save_snapshot("after")
    snapshots = db.get_snapshots()
    assert [s["id"] for s in snapshots] == [second, first]
    diff = db.compare_snapshots(first, second)
    assert diff["changes"]["total_runs"] == 4
    assert diff["changes"]["error_count"] == 1
    assert diff["from"]["note"] == "before"
    assert db.compare_snapshots(first, 999) == {"error": "Snapshot not found"}


def test_no_snapshots_yet():
    db = get_metrics_db()
    assert db.get_snapshots() == []
    assert db.compare_snapshots(1, 2) == {"error": "Snapshots table not found"}


def test_errors_level_keeps_only_failures(monkeypatch):
    monkeypatch.setenv("GWP_LOG_LEVEL", "errors")
    reset_config()
    db = get_metrics_db()
    record_runs(db)
    assert db.get_stats()["total_runs"] == 1


def test_details_depend_on_level(monkeypatch, tmp_path):
    db = MetricsDB(tmp_path / "metrics-level.sqlite")
    db.record_detail("barrington check", {"mismatches": 0}, "nandtree")
    assert db.conn.execute("SELECT COUNT(*) FROM run_details").fetchone()[0] == 0
    db.close()

    monkeypatch.setenv("GWP_LOG_LEVEL", "full")
    reset_config()
    db = MetricsDB(tmp_path / "metrics-full.sqlite")
    db.record_detail("barrington check", {"mismatches": 0}, "nandtree")
    row = db.conn.execute("SELECT details, input_text FROM run_details").fetchone()
    assert json.loads(row["details"]) == {"mismatches": 0}
    assert row["input_text"] == "nandtree"
    db.close()


def test_logging_off(monkeypatch, tmp_path):
    monkeypatch.setenv("GWP_LOG_LEVEL", "off")
    reset_config()
    db = MetricsDB(tmp_path / "never.sqlite")
    assert db.conn is None
    record_runs(db)
    assert db.get_stats() == {"logging": "disabled"}
    assert db.get_slow_runs() == []
    assert db.save_snapshot() == -1
    assert not (tmp_path / "never.sqlite").exists()
