"""Matrix, label and report files.

On disk a matrix always has one sample per row. In memory the package
works with ``d x n`` arrays (one sample per column), so loaders transpose.

``raw-f64`` layout: magic ``b"SKBM"``, little-endian u64 row count, u64
column count, then row-major little-endian float64 values.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError

RAW_MAGIC = b"SKBM"
SCHEMA_VERSION = "1"


def detect_format(path: str | Path) -> str:
    with open(path, "rb") as fh:
        return "raw-f64" if fh.read(4) == RAW_MAGIC else "csv"


def _parse_row(row: list[str]) -> list[float] | None:
    try:
        return [float(v) for v in row]
    except ValueError:
        return None


def _read_csv_rows(path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in raw]
            if not cells or cells == [""]:
                continue
            values = _parse_row(cells)
            if values is None:
                if lineno == 1:
                    continue  # header
                raise MatrixFormatError(f"{path}:{lineno}: non-numeric value")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise MatrixFormatError(f"{path}:{lineno}: expected {width} fields, found {len(values)}")
            rows.append(values)
    if not rows:
        raise MatrixFormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _read_raw(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:4] != RAW_MAGIC:
        raise MatrixFormatError(f"{path}: bad magic, expected {RAW_MAGIC!r}")
    if len(blob) < 20:
        raise MatrixFormatError(f"{path}: truncated header")
    rows, cols = struct.unpack_from("<QQ", blob, 4)
    expected = 20 + 8 * rows * cols
    if len(blob) != expected:
        raise MatrixFormatError(f"{path}: expected {expected} bytes for {rows}x{cols}, found {len(blob)}")
    return np.frombuffer(blob, dtype="<f8", offset=20).reshape(rows, cols).astype(np.float64)


def load_matrix(path: str | Path, fmt: str | None = None) -> np.ndarray:
    """Load a samples-by-features file as a ``d x n`` array."""
    fmt = fmt or detect_format(path)
    if fmt == "csv":
        return _read_csv_rows(path).T.copy()
    if fmt == "raw-f64":
        return _read_raw(path).T.copy()
    raise MatrixFormatError(f"unknown matrix format {fmt!r}")


def save_matrix(path: str | Path, M: np.ndarray, fmt: str = "csv") -> None:
    """Write a ``d x n`` array with one sample per row."""
    rows = np.asarray(M, dtype=np.float64).T
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for r in rows:
                writer.writerow([repr(float(v)) for v in r])
    elif fmt == "raw-f64":
        with open(path, "wb") as fh:
            fh.write(RAW_MAGIC + struct.pack("<QQ", *rows.shape))
            fh.write(np.ascontiguousarray(rows, dtype="<f8").tobytes())
    else:
        raise MatrixFormatError(f"unknown matrix format {fmt!r}")


def load_bits(path: str | Path) -> np.ndarray:
    """Load 0/1 data as an ``n x d`` uint8 array (rows are points)."""
    data = load_matrix(path).T
    if not np.all((data == 0) | (data == 1)):
        raise MatrixFormatError(f"{path}: expected only 0/1 values")
    return data.astype(np.uint8)


def load_labels(path: str | Path) -> np.ndarray:
    """One integer label per line (a one-column CSV; header allowed)."""
    col = _read_csv_rows(path)
    if col.shape[1] != 1:
        raise MatrixFormatError(f"{path}: label file must have one column")
    vals = col[:, 0]
    if not np.all(vals == np.round(vals)):
        raise MatrixFormatError(f"{path}: labels must be integers")
    return vals.astype(np.int64)


def save_labels(path: str | Path, labels) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(labels).ravel():
            fh.write(f"{int(v)}\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return _jsonable({k: getattr(obj, k) for k in obj.__dataclass_fields__})
    return obj


def make_report(subcommand: str, config: dict, results: dict, timings: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": _jsonable(config),
        "results": _jsonable(results),
        "timings": _jsonable(timings),
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_report(path: str | Path | None, report: dict) -> str:
    text = dump_report(report)
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)
    return text
