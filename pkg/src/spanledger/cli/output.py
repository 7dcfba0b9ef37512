"""Locale-independent tables rendered as CSV or JSON.

Numbers carry 9 significant digits; magnitudes below 1e-3 (or at least 1e9)
use scientific notation. Lines end with LF on every platform.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["SCHEMA_VERSION", "Table", "format_number", "render_csv", "table_to_json", "write_atomic", "write_table"]

SCHEMA_VERSION = 1


def format_number(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    if abs(x) < 1e-3 or abs(x) >= 1e9:
        return f"{x:.8e}"
    return f"{x:.9g}"


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, str):
        return x
    x = float(x)
    # JSON has no non-finite numbers; keep the CSV spelling
    return x if math.isfinite(x) else format_number(x)


@dataclass
class Table:
    """One output table.

    ``meta`` becomes ``# key: value`` header lines and ``footer`` a single
    trailing ``# footer:`` line.
    """

    name: str
    kind: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    footer: dict = field(default_factory=dict)

    @property
    def schema(self):
        return f"spanledger.{self.kind}/{SCHEMA_VERSION}"

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def render_csv(table: Table):
    lines = [f"# schema: {table.schema}"]
    for key, value in table.meta.items():
        lines.append(f"# {key}: {format_number(value)}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(format_number(v) for v in row))
    if table.footer:
        items = "; ".join(f"{k}={format_number(v)}" for k, v in table.footer.items())
        lines.append(f"# footer: {items}")
    return "\n".join(lines) + "\n"


def table_to_json(table: Table):
    return {
        "schema": table.schema,
        "name": table.name,
        "meta": {k: _json_value(v) for k, v in table.meta.items()},
        "columns": list(table.columns),
        "rows": [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows],
        "footer": {k: _json_value(v) for k, v in table.footer.items()},
    }


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(table: Table, directory, formats=("csv",)):
    written = []
    directory = Path(directory)
    if "csv" in formats:
        written.append(write_atomic(directory / f"{table.name}.csv", render_csv(table)))
    if "json" in formats:
        doc = json.dumps(table_to_json(table), indent=2, allow_nan=False) + "\n"
        written.append(write_atomic(directory / f"{table.name}.json", doc))
    return written
