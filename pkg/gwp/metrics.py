"""
Run metrics for gwp

Records one row per CLI run (command, group, sizes, verdict, latency) in a
local sqlite database so slow inputs and regressions can be found later.
"""

import hashlib
import json
import sqlite3
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import get_config


VERDICTS = ("trivial", "nontrivial", "ok", "failed")


@dataclass
class RunMetrics:
    """Metrics for a single command run"""

    command: str = ""
    group: Optional[str] = None
    input_digest: str = ""
    input_size: int = 0
    output_size: int = 0
    verdict: Optional[str] = None
    error: Optional[str] = None

    _start_time: float = field(default_factory=time.time)

    @classmethod
    def start(cls, command: str, group: Optional[str] = None, input_text: str = "") -> "RunMetrics":
        """Start tracking a new run"""
        return cls(
            command=command,
            group=group,
            input_digest=hashlib.sha256(input_text.encode()).hexdigest()[:16],
            input_size=len(input_text),
            _start_time=time.time(),
        )

    def finish(self, verdict: Optional[str] = None, output_size: int = 0, error: Optional[str] = None):
        """Finish tracking with the outcome"""
        self.verdict = verdict
        self.output_size = output_size
        self.error = error

    @property
    def latency_ms(self) -> int:
        return int((time.time() - self._start_time) * 1000)


class MetricsDB:
    """Database for storing run metrics"""

    def __init__(self, db_path: Optional[Path] = None):
        config = get_config()
        self.db_path = Path(db_path or config.metrics_db_path)
        self.log_level = config.log_level

        if self.log_level == "off":
            self.conn = None
        else:
            self.db_path.parent.mkdir(parents=True, exist_ok=True)
            self.conn = sqlite3.connect(str(self.db_path))
            self.conn.row_factory = sqlite3.Row
            self._init_schema()

    def _init_schema(self):
        if not self.conn:
            return

        self.conn.executescript("""
            -- One row per run
            CREATE TABLE IF NOT EXISTS run_events (
                id INTEGER PRIMARY KEY,
                timestamp TEXT NOT NULL,
                command TEXT NOT NULL,
                group_name TEXT,
                input_digest TEXT,
                input_size INTEGER,
                output_size INTEGER,
                verdict TEXT,
                latency_ms INTEGER,
                error TEXT
            );

            -- Optional: run details (log_level=debug or full)
            CREATE TABLE IF NOT EXISTS run_details (
                id INTEGER PRIMARY KEY,
                timestamp TEXT NOT NULL,
                command TEXT NOT NULL,
                details TEXT,
                input_text TEXT
            );

            CREATE INDEX IF NOT EXISTS idx_runs_timestamp
            ON run_events(timestamp);
            CREATE INDEX IF NOT EXISTS idx_runs_command
            ON run_events(command);
        """)
        self.conn.commit()

    def record(self, metrics: RunMetrics):
        """Record run metrics"""
        if not self.conn:
            return

        if self.log_level == "errors" and not metrics.error:
            return

        self.conn.execute("""
            INSERT INTO run_events
            (timestamp, command, group_name, input_digest, input_size,
             output_size, verdict, latency_ms, error)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
        """, (
            datetime.now().isoformat(),
            metrics.command,
            metrics.group,
            metrics.input_digest,
            metrics.input_size,
            metrics.output_size,
            metrics.verdict,
            metrics.latency_ms,
            metrics.error,
        ))
        self.conn.commit()

    def record_detail(self, command: str, details: Dict[str, Any], input_text: Optional[str] = None):
        """Record run details (only if log_level is debug or full; input text only for full)"""
        if not self.conn or self.log_level not in ("debug", "full"):
            return

        self.conn.execute("""
            INSERT INTO run_details (timestamp, command, details, input_text)
            VALUES (?, ?, ?, ?)
        """, (
            datetime.now().isoformat(),
            command,
            json.dumps(details, default=str),
            input_text if self.log_level == "full" else None,
        ))
        self.conn.commit()

    def get_stats(self) -> Dict[str, Any]:
        """Get aggregated metrics"""
        if not self.conn:
            return {"logging": "disabled"}

        row = self.conn.execute("""
            SELECT
                COUNT(*) as total_runs,
                AVG(latency_ms) as avg_latency_ms,
                MAX(latency_ms) as max_latency_ms,
                AVG(input_size) as avg_input_size,
                SUM(CASE WHEN verdict = 'trivial' THEN 1 ELSE 0 END) as trivial_count,
                SUM(CASE WHEN verdict = 'nontrivial' THEN 1 ELSE 0 END) as nontrivial_count,
                SUM(CASE WHEN error IS NOT NULL THEN 1 ELSE 0 END) as error_count
            FROM run_events
        """).fetchone()

        by_command = self.conn.execute("""
            SELECT command, COUNT(*) as count
            FROM run_events
            GROUP BY command
            ORDER BY count DESC
        """).fetchall()

        return {
            "total_runs": row["total_runs"],
            "avg_latency_ms": round(row["avg_latency_ms"] or 0, 1),
            "max_latency_ms": row["max_latency_ms"] or 0,
            "avg_input_size": round(row["avg_input_size"] or 0, 1),
            "trivial_count": row["trivial_count"] or 0,
            "nontrivial_count": row["nontrivial_count"] or 0,
            "error_count": row["error_count"] or 0,
            "by_command": {r["command"]: r["count"] for r in by_command},
        }

    def get_slow_runs(self, threshold_ms: int = 1000, limit: int = 10) -> List[Dict]:
        """Get inputs whose runs took longest (candidates for a closer look)"""
        if not self.conn:
            return []

        rows = self.conn.execute("""
            SELECT command, group_name, input_digest,
                   AVG(latency_ms) as avg_latency,
                   COUNT(*) as count
            FROM run_events
            WHERE latency_ms >= ?
            GROUP BY command, group_name, input_digest
            ORDER BY avg_latency DESC
            LIMIT ?
        """, (threshold_ms, limit)).fetchall()

        return [dict(row) for row in rows]

    def save_snapshot(self, note: Optional[str] = None) -> int:
        """Save a metrics snapshot for tracking changes over time"""
        if not self.conn:
            return -1

        self.conn.execute("""
            CREATE TABLE IF NOT EXISTS metrics_snapshots (
                id INTEGER PRIMARY KEY,
                timestamp TEXT NOT NULL,
                note TEXT,
                total_runs INTEGER,
                avg_latency_ms REAL,
                max_latency_ms INTEGER,
                error_count INTEGER,
                config_expand_limit INTEGER,
                config_support_limit INTEGER,
                slow_run_count INTEGER
            )
        """)

        stats = self.get_stats()
        slow = self.get_slow_runs()
        config = get_config()

        cursor = self.conn.execute("""
            INSERT INTO metrics_snapshots
            (timestamp, note, total_runs, avg_latency_ms, max_latency_ms,
             error_count, config_expand_limit, config_support_limit, slow_run_count)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
        """, (
            datetime.now().isoformat(),
            note,
            stats.get("total_runs", 0),
            stats.get("avg_latency_ms", 0),
            stats.get("max_latency_ms", 0),
            stats.get("error_count", 0),
            config.expand_limit,
            config.support_limit,
            len(slow),
        ))
        self.conn.commit()
        return cursor.lastrowid

    def get_snapshots(self, limit: int = 10) -> List[Dict]:
        """Get recent snapshots for comparison"""
        if not self.conn:
            return []

        try:
            rows = self.conn.execute("""
                SELECT * FROM metrics_snapshots
                ORDER BY id DESC
                LIMIT ?
            """, (limit,)).fetchall()
            return [dict(row) for row in rows]
        except sqlite3.OperationalError:
            return []  # Table doesn't exist yet

    def compare_snapshots(self, snapshot_id_1: int, snapshot_id_2: int) -> Dict[str, Any]:
        """Compare two snapshots"""
        if not self.conn:
            return {}

        try:
            s1 = self.conn.execute(
                "SELECT * FROM metrics_snapshots WHERE id = ?", (snapshot_id_1,)
            ).fetchone()
            s2 = self.conn.execute(
                "SELECT * FROM metrics_snapshots WHERE id = ?", (snapshot_id_2,)
            ).fetchone()

            if not s1 or not s2:
                return {"error": "Snapshot not found"}

            return {
                "from": {"id": s1["id"], "timestamp": s1["timestamp"], "note": s1["note"]},
                "to": {"id": s2["id"], "timestamp": s2["timestamp"], "note": s2["note"]},
                "changes": {
                    "total_runs": (s2["total_runs"] or 0) - (s1["total_runs"] or 0),
                    "avg_latency_ms": round((s2["avg_latency_ms"] or 0) - (s1["avg_latency_ms"] or 0), 1),
                    "error_count": (s2["error_count"] or 0) - (s1["error_count"] or 0),
                    "slow_runs": (s2["slow_run_count"] or 0) - (s1["slow_run_count"] or 0),
                }
            }
        except sqlite3.OperationalError:
            return {"error": "Snapshots table not found"}

    def close(self):
        if self.conn:
            self.conn.close()
            self.conn = None


# Singleton instance
_metrics_db: Optional[MetricsDB] = None


def get_metrics_db() -> MetricsDB:
    """Get or create the global metrics database"""
    global _metrics_db
    if _metrics_db is None:
        _metrics_db = MetricsDB()
    return _metrics_db
