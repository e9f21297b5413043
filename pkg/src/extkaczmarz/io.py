"""Matrix Market and CSV input/output."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import EntryCountMismatch, IndexOutOfBounds, MalformedHeader, MatrixMarketError
from .linalg import DenseMatrix, as_matrix, as_vector

__all__ = [
    "read_matrix_market",
    "read_vector",
    "write_matrix_market",
    "write_vector",
    "write_csv",
    "format_float",
]

_FIELDS = {"real", "double", "integer", "pattern"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric"}


def format_float(v: float) -> str:
    """17 significant digits: round-trips every double."""
    return f"{float(v):.17g}"


def _data_lines(lines, first):
    """Yield (lineno, tokens) for non-blank, non-comment lines from index ``first``."""
    for idx in range(first, len(lines)):
        text = lines[idx].strip()
        if not text or text.startswith("%"):
            continue
        yield idx + 1, text.split()


def _parse_header(line, path):
    parts = line.strip().split()
    if len(parts) != 5 or parts[0].lower() != "%%matrixmarket" or parts[1].lower() != "matrix":
        raise MalformedHeader(
            "expected '%%MatrixMarket matrix <array|coordinate> <field> <symmetry>'", path, 1
        )
    fmt, fld, sym = (p.lower() for p in parts[2:])
    if fmt not in ("array", "coordinate"):
        raise MalformedHeader(f"unknown format {fmt!r}", path, 1)
    if fld not in _FIELDS or (fld == "pattern" and fmt == "array"):
        raise MalformedHeader(f"unsupported field {fld!r}", path, 1)
    if sym not in _SYMMETRIES:
        raise MalformedHeader(f"unsupported symmetry {sym!r}", path, 1)
    return fmt, fld, sym


def _number(tok, path, lineno):
    try:
        return float(tok)
    except ValueError:
        raise MatrixMarketError(f"not a number: {tok!r}", path, lineno) from None


def _parse_mm(lines, path) -> np.ndarray:
    fmt, fld, sym = _parse_header(lines[0], path)
    data = _data_lines(lines, 1)
    try:
        size_lineno, size = next(data)
    except StopIteration:
        raise MalformedHeader("missing size line", path, None) from None
    want = 2 if fmt == "array" else 3
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise MalformedHeader(f"size line must hold {want} integers", path, size_lineno) from None
    if len(dims) != want or min(dims) < 0:
        raise MalformedHeader(f"size line must hold {want} nonnegative integers", path, size_lineno)
    m, n = dims[0], dims[1]
    if sym != "general" and m != n:
        raise MalformedHeader(f"{sym} matrix must be square, got {m}x{n}", path, size_lineno)
    A = np.zeros((m, n))

    if fmt == "array":
        # column-major; symmetric storage keeps only the lower triangle
        if sym == "general":
            slots = [(i, j) for j in range(n) for i in range(m)]
        elif sym == "symmetric":
            slots = [(i, j) for j in range(n) for i in range(j, m)]
        else:
            slots = [(i, j) for j in range(n) for i in range(j + 1, m)]
        count = 0
        last_lineno = size_lineno
        for lineno, toks in data:
            last_lineno = lineno
            for tok in toks:
                if count >= len(slots):
                    raise EntryCountMismatch(f"more than the {len(slots)} declared entries", path, lineno)
                i, j = slots[count]
                A[i, j] = _number(tok, path, lineno)
                count += 1
        if count != len(slots):
            raise EntryCountMismatch(f"declared {len(slots)} entries, found {count}", path, last_lineno)
    else:
        nnz = dims[2]
        count = 0
        last_lineno = size_lineno
        ntok = 2 if fld == "pattern" else 3
        for lineno, toks in data:
            last_lineno = lineno
            if count >= nnz:
                raise EntryCountMismatch(f"more than the {nnz} declared entries", path, lineno)
            if len(toks) != ntok:
                raise MatrixMarketError(f"expected {ntok} fields per entry, got {len(toks)}", path, lineno)
            try:
                i, j = int(toks[0]), int(toks[1])
            except ValueError:
                raise MatrixMarketError("row/column indices must be integers", path, lineno) from None
            if not (1 <= i <= m and 1 <= j <= n):
                raise IndexOutOfBounds(f"entry ({i}, {j}) outside {m}x{n}", path, lineno)
            v = 1.0 if fld == "pattern" else _number(toks[2], path, lineno)
            A[i - 1, j - 1] += v
            if sym != "general" and i != j:
                A[j - 1, i - 1] += v if sym == "symmetric" else -v
            count += 1
        if count != nnz:
            raise EntryCountMismatch(f"declared {nnz} entries, found {count}", path, last_lineno)

    if sym == "symmetric" and fmt == "array":
        A = np.tril(A) + np.tril(A, -1).T
    elif sym == "skew-symmetric" and fmt == "array":
        A = np.tril(A, -1) - np.tril(A, -1).T
    return A


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def read_matrix_market(path) -> DenseMatrix:
    """Read an ``array`` or ``coordinate`` Matrix Market file into a dense matrix."""
    lines = _read_lines(path)
    if not lines:
        raise MalformedHeader("empty file", path, None)
    return DenseMatrix(_parse_mm(lines, str(path)))


def read_vector(path) -> np.ndarray:
    """Read a vector stored as a one-column (or one-row) Matrix Market file or plain text.

    Plain text is any whitespace-separated list of numbers; lines starting
    with ``%`` or ``#`` are skipped.
    """
    lines = _read_lines(path)
    if lines and lines[0].lstrip().lower().startswith("%%matrixmarket"):
        arr = _parse_mm(lines, str(path))
        if 1 not in arr.shape:
            raise MatrixMarketError(f"expected a vector, got a {arr.shape[0]}x{arr.shape[1]} matrix", str(path))
        return arr.reshape(-1)
    values = []
    for idx, line in enumerate(lines):
        text = line.strip()
        if not text or text[0] in "%#":
            continue
        values.extend(_number(tok, str(path), idx + 1) for tok in text.split())
    if not values:
        raise MatrixMarketError("no vector entries found", str(path))
    return np.asarray(values, dtype=np.float64)


def write_matrix_market(path, A, comment: str | None = None) -> None:
    E = np.asarray(as_matrix(A).entries)
    m, n = E.shape
    out = ["%%MatrixMarket matrix array real general"]
    if comment:
        out.extend(f"% {line}" for line in comment.splitlines())
    out.append(f"{m} {n}")
    out.extend(format_float(v) for v in E.ravel(order="F"))
    _write_text(path, "\n".join(out) + "\n")


def write_vector(path, v, comment: str | None = None) -> None:
    v = as_vector(v)
    out = ["%%MatrixMarket matrix array real general"]
    if comment:
        out.extend(f"% {line}" for line in comment.splitlines())
    out.append(f"{v.shape[0]} 1")
    out.extend(format_float(x) for x in v)
    _write_text(path, "\n".join(out) + "\n")


def write_csv(result, path) -> None:
    """Write ``k,mean_sq_error[,bound]`` rows preceded by ``#`` metadata lines.

    ``result`` needs ``tracked_iterations``, ``mean_sq_error``, ``bound``
    (may be None) and ``csv_metadata()``.
    """
    lines = [f"# {key}: {value}" for key, value in result.csv_metadata()]
    has_bound = result.bound is not None
    lines.append("k,mean_sq_error,bound" if has_bound else "k,mean_sq_error")
    for idx, k in enumerate(result.tracked_iterations):
        row = [str(int(k)), format_float(result.mean_sq_error[idx])]
        if has_bound:
            row.append(format_float(result.bound[idx]))
        lines.append(",".join(row))
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text):
    path = Path(path)
    if path.parent and not path.parent.exists():
        os.makedirs(path.parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
