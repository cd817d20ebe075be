"""CSV fixtures: reading market files and writing synthetic series.

Format: optional ``#`` comment lines, a header row, then one row per
observation with an ISO-8601 date in the first mapped column.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .exceptions import ParseError

FIXTURE_START = dt.date(2000, 1, 3)


def _strip_comments(lines: Iterable[str]) -> Tuple[List[str], List[Tuple[int, str]]]:
    meta, body = [], []
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            meta.append(line[1:].strip())
        elif line.strip():
            body.append((lineno, line))
    return meta, body


def read_table(path, date_col="date", value_cols=("price", "volume")):
    """Parse a CSV file into ``(dates, {column: ndarray}, metadata_lines)``.

    Reported row numbers are physical line numbers in the file.
    """
    with open(path, newline="") as fh:
        text = fh.read()
    return parse_table(text, date_col, value_cols)


def parse_table(text, date_col="date", value_cols=("price", "volume")):
    meta, body = _strip_comments(io.StringIO(text).readlines())
    if not body:
        raise ParseError("file has no header row")
    header_line, header = body[0][0], next(csv.reader([body[0][1]]))
    header = [h.strip() for h in header]
    wanted = ([date_col] if date_col else []) + list(value_cols)
    for col in wanted:
        if col not in header:
            raise ParseError(f"missing column; header has {header}", row=header_line, column=col)
    idx = {col: header.index(col) for col in wanted}
    dates = []
    values: Dict[str, list] = {col: [] for col in value_cols}
    for lineno, line in body[1:]:
        row = next(csv.reader([line]))
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=lineno)
        if date_col:
            cell = row[idx[date_col]].strip()
            try:
                dates.append(dt.date.fromisoformat(cell))
            except ValueError:
                raise ParseError(f"invalid ISO-8601 date {cell!r}", row=lineno, column=date_col) from None
        for col in value_cols:
            cell = row[idx[col]].strip()
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"invalid number {cell!r}", row=lineno, column=col) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite number {cell!r}", row=lineno, column=col)
            values[col].append(v)
    return dates, {col: np.asarray(v, dtype=float) for col, v in values.items()}, meta


def fixture_dates(n: int) -> List[dt.date]:
    return [FIXTURE_START + dt.timedelta(days=i) for i in range(n)]


def format_table(columns: Dict[str, Sequence[float]], meta: Sequence[str] = (),
                 date_col="date") -> str:
    """Render columns as CSV text; floats use ``repr`` so files round-trip exactly."""
    names = list(columns)
    n = len(next(iter(columns.values())))
    out = io.StringIO()
    for line in meta:
        out.write(f"# {line}\n")
    out.write(",".join([date_col] + names) + "\n")
    for i, day in enumerate(fixture_dates(n)):
        cells = [day.isoformat()] + [repr(float(columns[c][i])) for c in names]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
