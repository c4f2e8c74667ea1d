"""CSV emission: '#' comment headers, comma rows, 12 significant digits."""

from __future__ import annotations

import io
import math
import sys


def format_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if v != v:  # nan
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def render_table(comments, header, rows):
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(format_value(v) for v in row) + "\n")
    return out.getvalue()


def write_table(path, comments, header, rows):
    """Write to `path`, or stdout when path is None or '-'. Returns text."""
    text = render_table(comments, header, rows)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_table(text):
    """Inverse of render_table: (comments, header, float-or-str rows)."""
    comments, header, rows = [], None, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        cells = line.split(",")
        if header is None:
            header = cells
            continue
        parsed = []
        for c in cells:
            try:
                parsed.append(float(c))
            except ValueError:
                parsed.append(c)
        rows.append(parsed)
    return comments, header, rows
