"""Matrix serialization.

CSV: one row per matrix row, complex entries written as ``re+imi``.
JSON: ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in row-major order.
"""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import InvalidInput


def format_complex(z) -> str:
    z = complex(z)
    sign = "-" if np.signbit(z.imag) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_complex(s: str) -> complex:
    """Parse ``re``, ``re+imi`` or ``re-imi``."""
    t = s.strip().replace(" ", "")
    try:
        if not t.endswith("i"):
            return complex(float(t), 0.0)
        body = t[:-1]
        # split at the last sign that is not an exponent sign
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                return complex(float(body[:k]), float(body[k:]))
        return complex(0.0, float(body))
    except ValueError:
        raise InvalidInput(f"cannot parse complex entry {s!r}") from None


def matrix_to_csv(M) -> str:
    M = np.atleast_2d(np.asarray(M))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in M:
        w.writerow([format_complex(x) for x in row])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidInput("matrix CSV must have rows of equal length")
    M = np.array([[parse_complex(x) for x in r] for r in rows])
    return M.real.copy() if np.all(M.imag == 0) else M


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M))
    flat = M.ravel()
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
            "data": [[float(np.real(z)), float(np.imag(z))] for z in flat]}


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        r, c, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        arr = np.array(data, dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad matrix JSON: {exc}") from None
    if arr.shape != (r * c, 2):
        raise InvalidInput("matrix JSON data length does not match rows*cols")
    M = (arr[:, 0] + 1j * arr[:, 1]).reshape(r, c)
    return M.real.copy() if np.all(arr[:, 1] == 0) else M


def load_matrix(path: str) -> np.ndarray:
    """Read a matrix from a ``.json`` or CSV file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("{"):
        try:
            return matrix_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"bad JSON in {path}: {exc}") from None
    return matrix_from_csv(text)
