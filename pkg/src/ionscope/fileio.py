"""Reader/writer for the commented column files shared by curves, dipoles and Stark samples.

Layout::

    # species: LiSr+
    # state: (1)1Sigma+
    # units: bohr hartree
    3.00  -0.512
    3.05  -0.518   # inline comments are allowed

Lines of the form ``# key: value`` (single-token key) are header entries; any
other ``#`` text is a comment.  A file whose name ends in ``.json`` holds the
same content as ``{"header": {...}, "data": [[...], ...]}``.
"""

import json
import math
import re
from pathlib import Path

from .errors import ParseError, UnitMismatchError

_HEADER = re.compile(r"^#\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*?)\s*$")


def read_table(path, ncols):
    """Return ``(header, rows, linenos)`` with rows as tuples of floats."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return _read_json(path, ncols)
    header = {}
    rows = []
    linenos = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _HEADER.match(line)
                if m:
                    header[m.group(1).lower()] = m.group(2)
                continue
            body = line.split("#", 1)[0].split()
            if len(body) != ncols:
                raise ParseError(path, lineno, f"expected {ncols} columns, found {len(body)}")
            try:
                values = tuple(float(tok) for tok in body)
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric value in {body!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError(path, lineno, f"non-finite value in {body!r}")
            rows.append(values)
            linenos.append(lineno)
    return header, rows, linenos


def _read_json(path, ncols):
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from None
    if not isinstance(doc, dict) or "header" not in doc or "data" not in doc:
        raise ParseError(path, 1, "JSON table needs 'header' and 'data' keys")
    header = {str(k).lower(): str(v) for k, v in doc["header"].items()}
    rows = []
    for i, row in enumerate(doc["data"]):
        if len(row) != ncols:
            raise ParseError(path, 1, f"data row {i}: expected {ncols} columns, found {len(row)}")
        values = tuple(float(v) for v in row)
        if not all(math.isfinite(v) for v in values):
            raise ParseError(path, 1, f"data row {i}: non-finite value")
        rows.append(values)
    return header, rows, [1] * len(rows)


def require(header, key, path):
    if key not in header:
        raise ParseError(path, 1, f"missing header '# {key}: ...'")
    return header[key]


def check_units(header, path, expected):
    declared = " ".join(require(header, "units", path).split())
    if declared.lower() != expected:
        raise UnitMismatchError(path, declared, expected)


def header_float(header, key, path):
    value = require(header, key, path)
    try:
        return float(value)
    except ValueError:
        raise ParseError(path, 1, f"header '{key}' is not a number: {value!r}") from None


def write_table(path, header, rows, fmt="%.12g"):
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = {"header": dict(header), "data": [list(map(float, r)) for r in rows]}
        path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
        return
    lines = [f"# {k}: {v}" for k, v in header.items()]
    lines += [" ".join(fmt % v for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
