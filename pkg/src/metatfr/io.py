"""Text formats for fields, matrices, generator words and reports.

Signal CSV: header ``# field vars=<v> N=<N>`` followed by ``index,re,im``
rows, multi-variable fields in row-major order.  Matrix CSV: header
``# symplectic D=<D>`` followed by row-major rows.  Floats are written with
17 significant digits so that every value round-trips exactly.
"""

from __future__ import annotations

import json
import re

import numpy as np

from .grid import Field, Grid
from .symplectic import Chirp, Dilate, Fourier, GeneratorWord

FLOAT_FMT = "{:.17g}"


class ParseError(ValueError):
    """Malformed input file; the message names the offending line."""

    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = path
        self.line = line


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _header(path, lines, pattern, what):
    if not lines:
        raise ParseError(path, 1, f"empty file, expected {what} header")
    m = re.fullmatch(pattern, lines[0].strip())
    if not m:
        raise ParseError(path, 1, f"expected {what} header, got {lines[0]!r}")
    return m


# --- fields -----------------------------------------------------------------


def format_field(f: Field) -> str:
    out = [f"# field vars={f.grid.vars} N={f.grid.N}"]
    for k, z in enumerate(f.values.ravel()):
        out.append(f"{k},{_fmt(z.real)},{_fmt(z.imag)}")
    return "\n".join(out) + "\n"


def write_field(path, f: Field) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_field(f))


def read_field(path) -> Field:
    lines = _read_lines(path)
    m = _header(path, lines, r"#\s*field\s+vars=(\d+)\s+N=(\d+)", "'# field vars=<v> N=<N>'")
    vars_, N = int(m.group(1)), int(m.group(2))
    try:
        grid = Grid(N, vars_)
    except ValueError as exc:
        raise ParseError(path, 1, str(exc)) from None
    size = N**vars_
    vals = np.empty(size, dtype=complex)
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected 'index,re,im', got {line!r}")
        try:
            idx, re_, im_ = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(path, lineno, f"non-numeric entry in {line!r}") from None
        if idx != seen:
            raise ParseError(path, lineno, f"expected index {seen}, got {idx}")
        if seen >= size:
            raise ParseError(path, lineno, f"more than {size} samples")
        if not (np.isfinite(re_) and np.isfinite(im_)):
            raise ParseError(path, lineno, "non-finite sample")
        vals[seen] = complex(re_, im_)
        seen += 1
    if seen != size:
        raise ParseError(path, len(lines) + 1, f"expected {size} samples, found {seen}")
    return Field(grid, vals.reshape(grid.shape))


# --- matrices ---------------------------------------------------------------


def format_matrix(A) -> str:
    A = np.asarray(A, dtype=float)
    D = A.shape[0] // 2
    rows = [",".join(_fmt(x) for x in row) for row in A]
    return "\n".join([f"# symplectic D={D}"] + rows) + "\n"


def write_matrix(path, A) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_matrix(A))


def read_matrix(path) -> np.ndarray:
    lines = _read_lines(path)
    m = _header(path, lines, r"#\s*symplectic\s+D=(\d+)", "'# symplectic D=<D>'")
    n = 2 * int(m.group(1))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            row = [float(x) for x in line.split(",")]
        except ValueError:
            raise ParseError(path, lineno, f"non-numeric entry in {line!r}") from None
        if len(row) != n:
            raise ParseError(path, lineno, f"expected {n} columns, got {len(row)}")
        rows.append(row)
    if len(rows) != n:
        raise ParseError(path, len(lines) + 1, f"expected {n} rows, found {len(rows)}")
    return np.array(rows)


# --- generator words --------------------------------------------------------


def word_to_json(word: GeneratorWord) -> str:
    items = [{"kind": fac.kind, "payload": np.asarray(fac.payload()).tolist()} for fac in word]
    return json.dumps({"dim": word.dim, "factors": items}, indent=2)


def word_from_json(text: str) -> GeneratorWord:
    data = json.loads(text)
    factors = []
    for item in data["factors"]:
        kind, payload = item["kind"], np.asarray(item["payload"], dtype=float)
        if kind == "fourier":
            signs = np.diag(payload) if payload.ndim == 2 else payload
            factors.append(Fourier(tuple(int(round(s)) for s in signs)))
        elif kind == "chirp":
            factors.append(Chirp(payload))
        elif kind == "dilate":
            factors.append(Dilate(payload))
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
    return GeneratorWord(factors, int(data["dim"]))


# --- reports and images -----------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def write_report(path, report: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_report(report))


def write_pgm(path, f: Field) -> None:
    """Magnitude map of a 2-variable field as an 8-bit binary PGM (lossy)."""
    mag = np.abs(np.asarray(f.values))
    if mag.ndim != 2:
        raise ValueError("PGM export needs a 2-variable field")
    peak = mag.max()
    img = np.zeros(mag.shape, dtype=np.uint8) if peak == 0 else np.round(255 * mag / peak).astype(np.uint8)
    # rows run over frequency, top row highest
    img = img.T[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(img.tobytes())
