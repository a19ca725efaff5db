"""Matrix and vector file formats.

Two interchangeable on-disk representations:

* text: a comment header ``# rows cols`` followed by one comma-separated
  line per row, values printed with %.17g so a write/read round trip is
  bit-exact for float64;
* binary: a 16-byte header (magic ``NLSM``, uint32 rows, uint32 cols,
  uint32 dtype tag, all little-endian) followed by the row-major float64
  payload.

Vectors are stored as single-column matrices and load back as 1-d arrays
via the ``*_vector`` helpers.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError

__all__ = [
    "save_matrix_text",
    "load_matrix_text",
    "save_matrix_binary",
    "load_matrix_binary",
    "save_matrix",
    "load_matrix",
    "save_vector",
    "load_vector",
]

MAGIC = b"NLSM"
DTYPE_FLOAT64 = 0
_HEADER = struct.Struct("<4sIII")


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise MatrixFormatError(f"expected 1-d or 2-d array, got ndim={a.ndim}")
    return np.ascontiguousarray(a)


def save_matrix_text(path, a) -> None:
    a = _as_matrix(a)
    rows, cols = a.shape
    with open(path, "w") as fh:
        fh.write(f"# {rows} {cols}\n")
        for row in a:
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")


def load_matrix_text(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise MatrixFormatError(f"{path}: missing '# rows cols' header")
        parts = header[1:].split()
        if len(parts) != 2:
            raise MatrixFormatError(f"{path}: malformed header {header!r}")
        try:
            rows, cols = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: malformed header {header!r}") from exc
        if rows < 0 or cols < 0:
            raise MatrixFormatError(f"{path}: negative dimensions in header")
        out = np.empty((rows, cols), dtype=np.float64)
        for i in range(rows):
            line = fh.readline()
            if not line:
                raise MatrixFormatError(f"{path}: expected {rows} rows, found {i}")
            fields = line.strip().split(",")
            if len(fields) != cols:
                raise MatrixFormatError(
                    f"{path}: row {i} has {len(fields)} fields, expected {cols}"
                )
            try:
                out[i] = [float(f) for f in fields]
            except ValueError as exc:
                raise MatrixFormatError(f"{path}: row {i} has a non-numeric field") from exc
    return out


def save_matrix_binary(path, a) -> None:
    a = _as_matrix(a)
    rows, cols = a.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols, DTYPE_FLOAT64))
        fh.write(a.astype("<f8", copy=False).tobytes(order="C"))


def load_matrix_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise MatrixFormatError(f"{path}: truncated header")
        magic, rows, cols, dtype = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise MatrixFormatError(f"{path}: bad magic {magic!r}")
        if dtype != DTYPE_FLOAT64:
            raise MatrixFormatError(f"{path}: unsupported dtype tag {dtype}")
        payload = fh.read(rows * cols * 8)
        if len(payload) != rows * cols * 8:
            raise MatrixFormatError(f"{path}: truncated payload")
        extra = fh.read(1)
        if extra:
            raise MatrixFormatError(f"{path}: trailing bytes after payload")
    return np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(rows, cols)


def _is_binary(path) -> bool:
    return Path(path).suffix.lower() in (".bin", ".nlsm")


def save_matrix(path, a) -> None:
    """Dispatch on extension: .bin/.nlsm binary, anything else text."""
    if _is_binary(path):
        save_matrix_binary(path, a)
    else:
        save_matrix_text(path, a)


def load_matrix(path) -> np.ndarray:
    if _is_binary(path):
        return load_matrix_binary(path)
    return load_matrix_text(path)


def save_vector(path, v) -> None:
    v = np.asarray(v, dtype=np.float64).ravel()
    save_matrix(path, v[:, None])


def load_vector(path) -> np.ndarray:
    a = load_matrix(path)
    if a.ndim != 2 or a.shape[1] != 1:
        raise MatrixFormatError(f"{path}: expected a single-column vector, got {a.shape}")
    return a[:, 0].copy()
