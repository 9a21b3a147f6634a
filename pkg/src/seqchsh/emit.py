"""Deterministic CSV/JSON writers."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .errors import NumericConsistencyError


def fmt(value) -> str:
    """Format a cell: 15 significant digits for floats, lower-case booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            raise NumericConsistencyError(f"refusing to emit non-finite value {value!r}")
        out = format(value, ".15g")
        return "0" if out == "-0" else out
    return str(value)


def csv_text(header, rows, comments=(), footer=()) -> str:
    """Render a CSV document.

    ``comments`` become leading ``# key=value`` lines; ``footer`` is a list of
    (header, rows) tables appended after a blank line each.
    """
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([[fmt(v) for v in row] for row in rows])
    for sub_header, sub_rows in footer:
        buf.write("\n")
        writer.writerow(sub_header)
        writer.writerows([[fmt(v) for v in row] for row in sub_rows])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_output(text: str, out: str | None, stream) -> None:
    if out is None:
        stream.write(text)
    else:
        Path(out).write_text(text, newline="")
