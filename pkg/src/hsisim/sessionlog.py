"""Append-only session log: canonical JSONL, one record per line.

Numbers serialize as shortest round-trip decimals and keys are sorted, so
a log is byte-reproducible from (config, seed, operator inputs). The final
record carries a checksum of every preceding byte; together with replay
regeneration this detects any single flipped byte in the file.
"""

from __future__ import annotations

import hashlib
import json

SCHEMA_VERSION = 1


def _digest(data: bytes) -> str:
    return hashlib.blake2b(data, digest_size=8).hexdigest()


class IntegrityError(Exception):
    def __init__(self, message, tick=None):
        super().__init__(message)
        self.tick = tick


def canonical(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True,
                      allow_nan=False)


def header_record(config_dict: dict) -> dict:
    return {"type": "Header", "schema": SCHEMA_VERSION, "config": config_dict}


class LogBuilder:
    """Accumulates canonical lines and the running checksum."""

    def __init__(self):
        self.lines: list = []
        self.records: list = []
        self._hash = None

    def add(self, record: dict) -> None:
        line = canonical(record)
        self.lines.append(line)
        self.records.append(record)

    def running_hash(self) -> str:
        return _digest(("\n".join(self.lines) + "\n").encode("utf-8"))

    def finalize(self, tick: int, reason: str, incomplete: bool) -> dict:
        end = {
            "t": tick, "type": "SessionEnd", "reason": reason,
            "incomplete": incomplete, "n_records": len(self.records),
            "log_hash": self.running_hash(),
        }
        self.add(end)
        return end

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.text())


def parse_log_text(text: str):
    """(header, records, lines); raises IntegrityError on malformed input."""
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise IntegrityError("empty log")
    records = []
    for i, line in enumerate(lines):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"malformed record on line {i + 1}: {exc}")
    header = records[0]
    if header.get("type") != "Header":
        raise IntegrityError("log does not start with a header record")
    if header.get("schema") != SCHEMA_VERSION:
        raise IntegrityError(f"unsupported log schema {header.get('schema')!r}")
    return header, records[1:], lines


def read_log(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_log_text(fh.read())


def verify_checksum(records, lines) -> bool:
    """True iff the log ends with a SessionEnd whose checksum matches."""
    if not records or records[-1].get("type") != "SessionEnd":
        return False
    end = records[-1]
    body = ("\n".join(lines[:-1]) + "\n").encode("utf-8")
    return end.get("log_hash") == _digest(body)
