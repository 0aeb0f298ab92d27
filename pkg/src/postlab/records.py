"""JSON Lines run records."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .certify import Certificate

SCHEMA_VERSION = "1"
VOLATILE = ("started_at", "finished_at", "elapsed_ms")


class SchemaError(ValueError):
    pass


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class RunRecord:
    command: str
    parameters: dict
    certificates: list[Certificate] = field(default_factory=list)
    result: dict | None = None
    started_at: str = ""
    finished_at: str = ""
    schema_version: str = SCHEMA_VERSION

    def as_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": self.parameters,
            "certificates": [c.as_dict() for c in self.certificates],
            "result": self.result,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {version!r}")
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            certificates=[Certificate.from_dict(c) for c in data.get("certificates", [])],
            result=data.get("result"),
            started_at=data.get("started_at", ""),
            finished_at=data.get("finished_at", ""),
            schema_version=version,
        )

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls.from_dict(json.loads(line))

    def stable_json(self) -> str:
        """Serialization without timestamps or timings."""
        d = self.as_dict()
        d.pop("started_at")
        d.pop("finished_at")
        for c in d["certificates"]:
            c.pop("elapsed_ms", None)
        return json.dumps(d, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class Appender:
    """Single writer for a results file; callers hand it finished records."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def write(self, records) -> int:
        n = 0
        with self.path.open("a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")
                n += 1
        return n


def read_records(path: str | Path) -> Iterator[RunRecord]:
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield RunRecord.from_json(line)
