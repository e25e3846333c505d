"""Kernel backend selection and the shared log-factorial table.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python twin.  Set ``PHASE_CONTRACT_PURE_PYTHON=1`` to force the
fallback (the benchmark and the twin-agreement tests do this explicitly via
:func:`get_backend`).
"""

from __future__ import annotations

import decimal
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from types import ModuleType

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

__all__ = ["kernels", "get_backend", "has_compiled", "log_factorials", "log_factorials_split", "max_workers", "ordered_map"]


def has_compiled() -> bool:
    return _compiled is not None


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module ``"cython"``, ``"python"``, or the default."""
    if name is None:
        if os.environ.get("PHASE_CONTRACT_PURE_PYTHON") or _compiled is None:
            return _kernels_py
        return _compiled
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


kernels = get_backend()

_LF_LOCK = threading.Lock()
_LF_GRID = 2.0**-32  # hi parts are multiples of this, so short sums of them are exact
_LF_DEC_CTX = decimal.Context(prec=40)


def _split_table(size: int) -> np.ndarray:
    """``(2, size)`` array: ``log(k!) = hi[k] + lo[k]`` with ``hi`` on a ``2^-32`` grid."""
    ctx = _LF_DEC_CTX
    acc = decimal.Decimal(0)
    hi = np.zeros(size)
    lo = np.zeros(size)
    for k in range(2, size):
        acc = ctx.add(acc, ctx.ln(decimal.Decimal(k)))
        h = round(float(acc) / _LF_GRID) * _LF_GRID
        hi[k] = h
        lo[k] = float(ctx.subtract(acc, decimal.Decimal(h)))
    table = np.stack([hi, lo])
    table.setflags(write=False)
    return table


_LF_TABLE = _split_table(1026)


def log_factorials_split(n_max: int) -> np.ndarray:
    """Read-only ``(2, N)`` table with ``log(k!) = t[0, k] + t[1, k]``, ``N > n_max``.

    Sums of up to a few dozen ``t[0]`` entries are exact in double precision,
    so log-domain factorial ratios keep full relative accuracy even when
    the individual logarithms are in the thousands.  The table grows
    (doubling) under a lock; readers see a complete array because the
    module-level reference is swapped atomically.
    """
    global _LF_TABLE
    table = _LF_TABLE
    if n_max < table.shape[1]:
        return table
    if n_max > 200_000:
        raise ValueError("factorial table request too large")
    with _LF_LOCK:
        table = _LF_TABLE
        if n_max >= table.shape[1]:
            table = _split_table(max(n_max + 1, 2 * table.shape[1]))
            _LF_TABLE = table
    return table


def log_factorials(n_max: int) -> np.ndarray:
    """``log(k!)`` for ``k = 0 .. >= n_max`` as a plain float array."""
    t = log_factorials_split(n_max)
    return t[0] + t[1]


def max_workers() -> int:
    """Thread cap from ``PHASE_CONTRACT_THREADS`` (default: CPU count)."""
    raw = os.environ.get("PHASE_CONTRACT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items) -> list:
    """``[fn(x) for x in items]`` on up to :func:`max_workers` threads, in input order.

    The compiled kernels release the GIL, so table and sweep jobs overlap.
    """
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
