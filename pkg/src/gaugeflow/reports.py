"""Deterministic JSON run reports and CSV emission for the CLI."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


SCHEMA_VERSION = 1


@dataclass
class RunReport:
    """Schema-versioned report: config echo suffices to reproduce the run.

    ``wall_time_s`` is the isolated nondeterministic field; consumers that
    compare reports byte-for-byte drop it first.
    """

    command: str
    config: dict
    metrics: dict = field(default_factory=dict)
    checksums: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "metrics": self.metrics,
            "checksums": self.checksums,
            "wall_time_s": self.wall_time_s,
        }
        return canonical_json(payload)


def canonical_json(payload) -> str:
    """Sorted-key JSON with newline; floats use shortest round-trip repr."""
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def strip_wall_time(report_text: str) -> str:
    """Re-serialize a report without its isolated wall-time field."""
    data = json.loads(report_text)
    data.pop("wall_time_s", None)
    return canonical_json(data)


def file_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)
