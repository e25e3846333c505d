"""Reading and writing operators, sampled symbols and tables.

Every float is written with 17 significant digits so that files round-trip
exactly.  Complex numbers are ``[re, im]`` pairs in JSON and two columns in
CSV.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import IO, Iterable, Optional, Union

import numpy as np

from .errors import DomainError

__all__ = [
    "fmt",
    "operator_to_json",
    "operator_from_json",
    "write_operator",
    "read_operator",
    "samples_csv",
    "wigner_csv",
    "term_table_csv",
    "write_text",
    "table_csv",
    "to_json",
    "dump_json",
]

PathLike = Union[str, Path]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj, indent: Optional[int] = None) -> str:
    """``json.dumps`` with floats written as ``%.17g``; numpy scalars and arrays accepted."""
    pad = "" if indent is None else "\n"

    def enc(o, depth):
        nl = pad + " " * ((depth + 1) * (indent or 0))
        end = pad + " " * (depth * (indent or 0))
        sep = ", " if indent is None else ","
        if isinstance(o, np.ndarray):
            o = o.tolist()
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [nl + json.dumps(str(k)) + ": " + enc(v, depth + 1) for k, v in o.items()]
            return "{" + sep.join(items) + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            flat = all(not isinstance(v, (dict, list, tuple)) for v in o)
            if flat or indent is None:
                return "[" + ", ".join(enc(v, depth + 1) for v in o) + "]"
            return "[" + sep.join(nl + enc(v, depth + 1) for v in o) + end + "]"
        if isinstance(o, np.generic):
            o = o.item()
        if isinstance(o, bool) or o is None or isinstance(o, (int, str)):
            return json.dumps(o)
        if isinstance(o, float):
            if not np.isfinite(o):
                raise ValueError(f"cannot write non-finite float {o} as JSON")
            return fmt(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0)


def operator_to_json(matrix: np.ndarray, *, two_s: Optional[int] = None, n_max: Optional[int] = None) -> str:
    """Serialize a square complex matrix, tagged with its spin or Fock cutoff."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"operator must be square, got shape {matrix.shape}")
    if (two_s is None) == (n_max is None):
        raise ValueError("give exactly one of two_s, n_max")
    doc = {"two_s": two_s} if two_s is not None else {"n_max": n_max}
    doc["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in matrix]
    return to_json(doc)


def operator_from_json(text: str) -> tuple[dict, np.ndarray]:
    """Inverse of :func:`operator_to_json`; returns ``(header, matrix)``."""
    try:
        doc = json.loads(text)
        rows = doc["matrix"]
        matrix = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (ValueError, KeyError, TypeError) as exc:
        raise DomainError(f"malformed operator file: {exc}") from exc
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"operator must be square, got shape {matrix.shape}")
    header = {k: v for k, v in doc.items() if k != "matrix"}
    if "two_s" in header and matrix.shape[0] != header["two_s"] + 1:
        raise DomainError(f"matrix dimension {matrix.shape[0]} does not match two_s={header['two_s']}")
    if "n_max" in header and matrix.shape[0] != header["n_max"] + 1:
        raise DomainError(f"matrix dimension {matrix.shape[0]} does not match n_max={header['n_max']}")
    return header, matrix


def write_operator(path: PathLike, matrix: np.ndarray, **tag) -> None:
    Path(path).write_text(operator_to_json(matrix, **tag) + "\n")


def read_operator(path: PathLike) -> tuple[dict, np.ndarray]:
    return operator_from_json(Path(path).read_text())


def table_csv(header: list[str], rows: Iterable[Iterable[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def samples_csv(theta, phi, weight, values) -> str:
    """``theta,phi,weight,re,im`` rows for a sampled symbol."""
    values = np.asarray(values, dtype=complex)
    return table_csv(["theta", "phi", "weight", "re", "im"],
                zip(theta, phi, weight, values.real, values.imag))


def wigner_csv(q, p, w) -> str:
    return table_csv(["q", "p", "w"], zip(q, p, w))


def term_table_csv(table, integral: Optional[float] = None) -> str:
    """``l,x_l,term,partial_sum`` rows; the optional integral goes in a trailing comment."""
    l = np.arange(len(table.terms))
    out = table_csv(["l", "x_l", "term", "partial_sum"], zip(l, table.x, table.terms, table.partial_sums))
    if integral is not None:
        out += f"# integral_t2,{fmt(integral)}\n"
    return out


def write_text(text: str, out: Optional[PathLike], stream: Optional[IO[str]] = None) -> None:
    """Write to ``out`` or, when it is ``None`` or ``-``, to ``stream``."""
    if out is None or str(out) == "-":
        import sys

        (stream or sys.stdout).write(text)
    else:
        Path(out).write_text(text)


def dump_json(obj) -> str:
    return to_json(obj, indent=2) + "\n"
