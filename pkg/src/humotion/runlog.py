"""Per-run session logging: a CSV time series plus a JSON event stream."""

from __future__ import annotations

import json
import secrets
import time
from pathlib import Path


class SessionLog:
    """Filesystem home for one run's outputs.

    Allocates a unique run id, reserves a CSV path for whatever loop is
    producing time-series rows, and appends timestamped events (falls,
    mode changes, completion) to a JSON-lines stream as they happen.
    """

    def __init__(self, directory: str | Path, run_id: str | None = None):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        if run_id is None:
            run_id = time.strftime("%Y%m%d-%H%M%S") + "-" + secrets.token_hex(2)
        self.run_id = run_id
        self.csv_path = self.directory / f"{run_id}.csv"
        self.events_path = self.directory / f"{run_id}.events.jsonl"
        self.events: list[dict] = []
        self._stream = None

    def event(self, kind: str, t: float | None = None, **detail) -> dict:
        entry = {"kind": kind}
        if t is not None:
            entry["t"] = float(t)
        entry.update(detail)
        self.events.append(entry)
        if self._stream is None:
            self._stream = self.events_path.open("a", encoding="utf-8")
        self._stream.write(json.dumps(entry) + "\n")
        self._stream.flush()
        return entry

    def close(self) -> None:
        if self._stream is not None:
            self._stream.close()
            self._stream = None

    def __enter__(self) -> "SessionLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
