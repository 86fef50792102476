"""Training-log records and JSON-lines persistence."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class TrainingRecord:
    iteration: int
    metrics: dict[str, float]
    theta_snapshot: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> str:
        return json.dumps({"iter": self.iteration, **{k: float(v) for k, v in self.metrics.items()}})

    @classmethod
    def from_json(cls, line: str) -> TrainingRecord:
        payload = json.loads(line)
        it = payload.pop("iter")
        return cls(it, payload)


class LogWriter:
    """Appends one JSON record per line, flushing so progress is observable."""

    def __init__(self, path=None):
        self._fh = None
        if path is not None:
            self._fh = open(path, "w")

    def write(self, record: TrainingRecord) -> None:
        if self._fh is not None:
            self._fh.write(record.to_json() + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_log(path) -> list[TrainingRecord]:
    return [TrainingRecord.from_json(line) for line in Path(path).read_text().splitlines() if line.strip()]
