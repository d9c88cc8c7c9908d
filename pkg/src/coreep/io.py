"""Matrix files and JSON report encoding.

JSON matrices look like ``{"rows": 2, "cols": 2, "data": [[[1, 0], [0, 0]], ...]}``
where each entry is ``[re, im]`` (a bare number is read as real).  CSV
matrices have one row per line with tokens such as ``2``, ``1.5-2i`` or ``3i``.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParseError
from .kernel import as_matrix


def _entry(value, line, col):
    if isinstance(value, bool):
        raise ParseError("boolean is not a matrix entry", line, col)
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise ParseError(f"entry {value!r} is not a number or [re, im] pair", line, col)


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "data" not in obj:
        raise ParseError("matrix JSON must be an object with a 'data' field")
    data = obj["data"]
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError("'data' must be a nonempty list of rows")
    rows = obj.get("rows", len(data))
    cols = obj.get("cols", len(data[0]))
    if len(data) != rows:
        raise DimensionError(f"declared rows={rows} but data has {len(data)} rows")
    out = np.empty((rows, cols), complex)
    for i, row in enumerate(data):
        if len(row) != cols:
            raise DimensionError(f"row {i + 1} has {len(row)} entries, declared cols={cols}")
        for j, v in enumerate(row):
            out[i, j] = _entry(v, i + 1, j + 1)
    return as_matrix(out)


def _complex_token(tok: str, line: int, col: int) -> complex:
    t = tok.strip().replace(" ", "")
    if not t:
        raise ParseError("empty entry", line, col)
    t = t.replace("i", "j").replace("I", "j")
    try:
        return complex(t)
    except ValueError:
        raise ParseError(f"cannot parse {tok.strip()!r} as a complex number", line, col) from None


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, fields in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not fields or all(not f.strip() for f in fields) or fields[0].lstrip().startswith("#"):
            continue
        row = [_complex_token(f, lineno, c) for c, f in enumerate(fields, start=1)]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"ragged row: {len(row)} entries, expected {width}", lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no matrix rows found")
    return as_matrix(np.array(rows, complex))


def parse_matrix_file(path, format: str = "auto") -> np.ndarray:
    """Read a matrix from a JSON or CSV file.

    Raises ``OSError`` if the file cannot be read, ``ParseError`` for
    malformed content and ``DimensionError`` for declared/actual shape
    mismatches.
    """
    path = Path(path)
    text = path.read_text()
    if format == "auto":
        suffix = path.suffix.lower()
        if suffix == ".json":
            format = "json"
        elif suffix == ".csv":
            format = "csv"
        else:
            format = "json" if text.lstrip().startswith("{") else "csv"
    if format == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return matrix_from_json(obj)
    if format == "csv":
        return matrix_from_csv(text)
    raise ValueError(f"unknown matrix format {format!r}")


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def write_matrix_json(m, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(m)) + "\n")


def to_jsonable(obj):
    """Recursively convert report values into JSON-compatible objects.

    Matrices become matrix objects, complex scalars ``[re, im]`` pairs and
    non-finite floats ``null``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return matrix_to_json(obj)
        if obj.ndim == 1:
            return [to_jsonable(v) for v in obj]
        return to_jsonable(obj.item())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj
