"""JSON and CSV formats for operators, tables and records.

Operator files look like::

    {"dim": 2, "matrices": [{"label": "P", "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}]}

Floats are written with ``repr`` precision, so a round trip is bit-exact.
"""

from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .errors import InputError
from .linalg import as_complex_matrix


def matrix_entry(label: str, m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "label": label,
        "re": [[float(x) for x in row] for row in m.real],
        "im": [[float(x) for x in row] for row in m.imag],
    }


def parse_matrix_entry(entry: dict, dim: int | None = None):
    try:
        re = np.asarray(entry["re"], dtype=np.float64)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=np.float64)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed matrix entry: {exc}") from exc
    if re.shape != im.shape:
        raise InputError("re and im parts differ in shape")
    # assigning parts keeps signed zeros; re + 1j * im would not
    z = np.empty(re.shape, dtype=np.complex128)
    z.real, z.imag = re, im
    m = as_complex_matrix(z)
    if dim is not None and m.shape[0] != dim:
        raise InputError(f"matrix {entry.get('label')!r} has dimension {m.shape[0]}, expected {dim}")
    return entry.get("label", ""), m


def dumps_operators(matrices: dict, dim: int | None = None) -> str:
    """Serialize ``{label: matrix}`` to the operator JSON format."""
    items = list(matrices.items())
    if dim is None:
        dim = np.asarray(items[0][1]).shape[0] if items else 0
    doc = {"dim": dim, "matrices": [matrix_entry(k, v) for k, v in items]}
    return json.dumps(doc, indent=2)


def loads_operators(text: str) -> dict:
    """Parse the operator JSON format into an ordered ``{label: matrix}`` dict."""
    try:
        doc = json.loads(text)
        dim = int(doc["dim"])
        entries = doc["matrices"]
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed operator document: {exc}") from exc
    out = {}
    for i, entry in enumerate(entries):
        label, m = parse_matrix_entry(entry, dim)
        out[label or f"m{i}"] = m
    return out


def load_operators(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads_operators(fh.read())


def save_operators(path, matrices: dict):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_operators(matrices))


def fmt17(x) -> str:
    """17 significant digits; empty string for ``None``."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def to_csv(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt17(v) if isinstance(v, (float, np.floating)) else ("" if v is None else v)
                         for v in row])
    return buf.getvalue()
