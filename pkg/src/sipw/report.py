"""Machine-readable reports and their JSON / CSV serialization.

Floats are written with ``repr``, which round-trips exactly; non-finite
values become JSON ``null`` or empty CSV cells.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__


@dataclass
class CheckRecord:
    check_id: str
    max_relative_residual: float | None
    passed: bool
    witness_x: float | None = None
    tolerance: float | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "max_relative_residual": self.max_relative_residual,
            "pass": self.passed,
            "witness_x": self.witness_x,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    command: str
    family: str | None = None
    params: dict | None = None
    grid: dict | None = None
    tolerances: dict | None = None
    checks: list[CheckRecord] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    # CSV view: header plus rows
    table: tuple[list[str], list[list]] | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timestamp: bool = True) -> dict:
        out = {
            "tool": "sipw",
            "version": __version__,
            "command": self.command,
            "family": self.family,
            "params": self.params,
            "grid": self.grid,
            "tolerances": self.tolerances,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "data": self.data,
        }
        if timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return out

    def csv_table(self) -> tuple[list[str], list[list]]:
        if self.table is not None:
            return self.table
        header = ["check_id", "max_relative_residual", "pass", "witness_x"]
        rows = [[c.check_id, c.max_relative_residual, c.passed, c.witness_x] for c in self.checks]
        return header, rows


def to_jsonable(value):
    """Recursively convert numpy values; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    return value


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def render(report: VerificationReport, fmt: str, timestamp: bool = True) -> str:
    if fmt == "json":
        payload = to_jsonable(report.to_dict(timestamp=timestamp))
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        header, rows = report.csv_table()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: VerificationReport, fmt: str, path: str = "-",
                timestamp: bool = True) -> None:
    """Write ``report`` as JSON or CSV to ``path`` (``-`` is stdout).

    Raises:
        OSError: when the destination cannot be written.
    """
    text = render(report, fmt, timestamp=timestamp)
    if path in ("-", ""):
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
