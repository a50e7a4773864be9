"""CSV and JSON serialization for sample sets, histograms and fits.

All CSV files use comma separators, dot decimals, LF line endings and
UTF-8.  Floats are written with shortest round-trip repr, so identical
computations produce byte-identical files.
"""

import json
from pathlib import Path

import numpy as np

from .fitting import Histogram

HISTOGRAM_HEADER = "bin_center,density"
VALUES_HEADER = "value"
CURVE_HEADER = "x,density"


def format_float(x: float) -> str:
    return repr(float(x))


def _write_lines(path, lines):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_histogram_csv(path, hist: Histogram) -> None:
    lines = [HISTOGRAM_HEADER]
    for c, d in zip(hist.bin_centers, hist.density):
        lines.append(f"{format_float(c)},{format_float(d)}")
    _write_lines(path, lines)


def write_values_csv(path, values) -> None:
    lines = [VALUES_HEADER]
    lines.extend(format_float(v) for v in np.asarray(values, dtype=np.float64))
    _write_lines(path, lines)


def write_curve_csv(path, xs, ys, header: str = CURVE_HEADER) -> None:
    lines = [header]
    for x, y in zip(xs, ys):
        lines.append(f"{format_float(x)},{format_float(y)}")
    _write_lines(path, lines)


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


class CsvFormatError(ValueError):
    """Malformed CSV; the message carries the file and line number."""


def _read_table(path, expected_header):
    path = Path(path)
    if not path.exists():
        raise CsvFormatError(f"{path}: file not found")
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if lineno == 1:
                if line != expected_header:
                    raise CsvFormatError(
                        f"{path}:1: expected header '{expected_header}', got '{line}'"
                    )
                continue
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(expected_header.split(",")):
                raise CsvFormatError(f"{path}:{lineno}: expected {expected_header}, got '{line}'")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise CsvFormatError(f"{path}:{lineno}: non-numeric field in '{line}'")
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def read_histogram_csv(path):
    """(bin_centers, density) from a histogram CSV, validating the schema."""
    table = _read_table(path, HISTOGRAM_HEADER)
    centers, density = table[:, 0], table[:, 1]
    if centers.size >= 2:
        widths = np.diff(centers)
        if not np.allclose(widths, widths[0], rtol=1e-9, atol=1e-12):
            raise CsvFormatError(f"{path}: bin centers are not uniformly spaced")
    return centers, density


def read_values_csv(path):
    return _read_table(path, VALUES_HEADER)[:, 0]
