"""Plain-text matrix and label files, written atomically.

MAT-1: first line ``n``, then ``n`` lines of ``n`` whitespace-separated floats.
LBL-1: one nonnegative integer cluster id per line.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import FileFormatError, InvalidInputError
from .matrix import AffinityMatrix


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_lines(path) -> list[str]:
    try:
        with open(path) as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise FileFormatError(path, None, f"cannot read file: {exc.strerror or exc}") from exc


def format_matrix(values) -> str:
    m = np.asarray(values, dtype=float)
    rows = [str(m.shape[0])]
    rows += [" ".join(f"{x:.17g}" for x in row) for row in m]
    return "\n".join(rows) + "\n"


def write_matrix(path, values) -> None:
    atomic_write_text(path, format_matrix(getattr(values, "values", values)))


def read_matrix(path) -> np.ndarray:
    """Parse a MAT-1 file into an ``(n, n)`` float array without validation."""
    lines = _read_lines(path)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FileFormatError(path, 1, "empty file, expected the matrix size")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise FileFormatError(path, 1, f"expected an integer size, got {lines[0].strip()!r}") from None
    if n < 1:
        raise FileFormatError(path, 1, f"matrix size must be positive, got {n}")
    if len(lines) - 1 != n:
        raise FileFormatError(path, len(lines), f"expected {n} matrix rows, found {len(lines) - 1}")
    out = np.empty((n, n))
    for i, line in enumerate(lines[1:]):
        tokens = line.split()
        if len(tokens) != n:
            raise FileFormatError(path, i + 2, f"expected {n} values, found {len(tokens)}")
        try:
            out[i] = [float(t) for t in tokens]
        except ValueError as exc:
            raise FileFormatError(path, i + 2, str(exc)) from None
        if not np.all(np.isfinite(out[i])):
            raise FileFormatError(path, i + 2, "non-finite value")
    return out


def load_affinity(path) -> AffinityMatrix:
    values = read_matrix(path)
    try:
        return AffinityMatrix(values)
    except InvalidInputError as exc:
        raise FileFormatError(path, None, str(exc)) from None


def format_labels(labels) -> str:
    return "".join(f"{int(x)}\n" for x in np.asarray(getattr(labels, "labels", labels)))


def write_labels(path, labels) -> None:
    atomic_write_text(path, format_labels(labels))


def read_labels(path) -> np.ndarray:
    lines = _read_lines(path)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FileFormatError(path, 1, "empty labels file")
    out = np.empty(len(lines), dtype=np.int64)
    for i, line in enumerate(lines):
        try:
            out[i] = int(line.strip())
        except ValueError:
            raise FileFormatError(path, i + 1, f"expected an integer label, got {line.strip()!r}") from None
        if out[i] < 0:
            raise FileFormatError(path, i + 1, f"labels must be nonnegative, got {out[i]}")
    return out
