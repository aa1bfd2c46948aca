"""Append-only JSON-Lines event log with full replay.

One file per data directory; every state change is appended and fsynced
before the caller acknowledges it.  Replay tolerates a truncated final
line (a crash mid-write) and yields events in sequence order.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


@dataclass(frozen=True)
class EventRecord:
    seq: int
    kind: str
    payload: dict
    timestamp: float


class EventLog:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._next_seq = 1
        for record in self.replay():
            self._next_seq = record.seq + 1

    def append(self, kind: str, payload: dict) -> EventRecord:
        with self._lock:
            record = EventRecord(self._next_seq, kind, payload, time.time())
            line = json.dumps(
                {"seq": record.seq, "kind": kind, "payload": payload, "timestamp": record.timestamp},
                sort_keys=True,
            )
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self._next_seq += 1
            return record

    def replay(self) -> Iterator[EventRecord]:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn tail write; everything before it is intact
                yield EventRecord(data["seq"], data["kind"], data["payload"], data["timestamp"])
