"""JSON reports and the append-only CSV verification ledger."""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

LEDGER_NAME = "verify_ledger.csv"
LEDGER_COLUMNS = ("kind", "M1", "M2", "M3", "K1", "K2", "K3", "b", "trials", "seed", "lhs", "rhs", "ratio")


def _format(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def ledger_line(row: dict) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow([_format(row.get(c)) for c in LEDGER_COLUMNS])
    return buf.getvalue()


def append_ledger(path, rows) -> Path:
    """Append rows; each line goes out in one O_APPEND write."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL, 0o644)
        os.write(fd, (",".join(LEDGER_COLUMNS) + "\n").encode())
        os.close(fd)
    except FileExistsError:
        pass
    fd = os.open(path, os.O_WRONLY | os.O_APPEND)
    try:
        for row in rows:
            os.write(fd, ledger_line(row).encode())
    finally:
        os.close(fd)
    return path


def read_ledger(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    os.replace(tmp, path)
    return path
