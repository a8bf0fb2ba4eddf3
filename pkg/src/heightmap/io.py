"""Text formats: box datasets, clique matrices and mass vectors.

Dataset file::

    # comment
    dim 2
    0 2 0 2              lo1 hi1 lo2 hi2, default closures (open, closed)
    2 4 2 4 1 1 1 1      ... followed by c(lo1) c(hi1) c(lo2) c(hi2)

Fields are separated by whitespace and/or commas; ``inf``/``-inf`` denote
infinities.  Coordinates are parsed as exact decimals and the original text
of each field is kept for output.  A header ``dim d canonical`` marks integer
canonical boxes.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import BoxValidationError, EmptyBoxError, InvalidBoxError, ParseError
from .geometry import ObservationBox
from .npmle import CliqueMatrix

__all__ = [
    "Dataset",
    "parse_value",
    "read_dataset",
    "write_dataset",
    "format_value",
    "write_canonical",
    "read_clique_matrix",
    "write_clique_supports",
    "write_clique_dense",
    "read_alpha",
]

_SPLIT = re.compile(r"[,\s]+")
_INF = {"inf": math.inf, "+inf": math.inf, "infinity": math.inf, "+infinity": math.inf,
        "-inf": -math.inf, "-infinity": -math.inf}


class Dataset(list):
    """List of boxes read from a file, plus the header's ``d`` and canonical flag."""

    def __init__(self, boxes=(), d: int | None = None, canonical: bool = False, lines=()):
        super().__init__(boxes)
        self.d = d
        self.canonical = canonical
        # source line of each box
        self.lines = list(lines)


def parse_value(token: str):
    t = token.strip()
    low = t.lower()
    if low in _INF:
        return _INF[low]
    try:
        v = Decimal(t)
    except InvalidOperation:
        raise ValueError(f"not a number: {token!r}") from None
    if not v.is_finite():
        raise ValueError(f"not a finite number or inf: {token!r}")
    return v


def format_value(v, literal: str | None = None) -> str:
    if literal is not None:
        return literal
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _split(line: str) -> list[str]:
    return [t for t in _SPLIT.split(line.strip()) if t]


def _parse_header(fields, lineno, path):
    if len(fields) not in (2, 3) or (len(fields) == 3 and fields[2].lower() != "canonical"):
        raise ParseError("header must read 'dim <d>' or 'dim <d> canonical'", lineno, path)
    try:
        d = int(fields[1])
    except ValueError:
        raise ParseError(f"bad dimension {fields[1]!r}", lineno, path) from None
    if d < 1:
        raise ParseError("dimension must be >= 1", lineno, path)
    return d, len(fields) == 3


def read_dataset(source, dim: int | None = None, path=None) -> Dataset:
    """Parse a dataset from a path or an iterable of lines.

    ``dim`` must agree with the header when both are present; one of them is
    required.  Raises :class:`ParseError` for malformed lines and
    :class:`BoxValidationError` for empty or malformed boxes.
    """
    if isinstance(source, (str, Path)):
        path = str(source)
        with open(source, encoding="utf-8") as fh:
            return read_dataset(fh.readlines(), dim, path)
    d = dim
    canonical = False
    seen_header = False
    boxes, lines = [], []
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = _split(line)
        if fields[0].lower() == "dim":
            if seen_header or boxes:
                raise ParseError("header must come before any box", lineno, path)
            hd, canonical = _parse_header(fields, lineno, path)
            if dim is not None and dim != hd:
                raise ParseError(f"--dim {dim} contradicts header dim {hd}", lineno, path)
            d = hd
            seen_header = True
            continue
        if d is None:
            raise ParseError("no 'dim <d>' header and no dimension given", lineno, path)
        if len(fields) not in (2 * d, 4 * d):
            raise ParseError(
                f"expected {2 * d} coordinates, optionally followed by {2 * d} closure flags; "
                f"got {len(fields)} fields", lineno, path)
        try:
            vals = [parse_value(t) for t in fields[:2 * d]]
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
        if len(fields) == 4 * d:
            flags = fields[2 * d:]
            if any(f not in ("0", "1") for f in flags):
                raise ParseError("closure flags must be 0 or 1", lineno, path)
            closed = [(flags[2 * a] == "1", flags[2 * a + 1] == "1") for a in range(d)]
        else:
            closed = None
        index = len(boxes) + 1
        bounds = [(vals[2 * a], vals[2 * a + 1]) for a in range(d)]
        literals = [(fields[2 * a], fields[2 * a + 1]) for a in range(d)]
        try:
            box = ObservationBox.from_bounds(bounds, closed, index=index, literals=literals)
        except EmptyBoxError as exc:
            raise BoxValidationError(f"box {index} is empty on axis {exc.axis}", lineno, index, path) from None
        except InvalidBoxError as exc:
            raise BoxValidationError(str(exc), lineno, index, path) from None
        boxes.append(box)
        lines.append(lineno)
    if not boxes:
        raise ParseError("dataset contains no boxes", None, path)
    return Dataset(boxes, d, canonical, lines)


def _box_fields(box: ObservationBox) -> list[str]:
    coords, flags = [], []
    for lo, hi in zip(box.lower, box.upper):
        coords += [format_value(lo.value, lo.literal), format_value(hi.value, hi.literal)]
        flags += ["1" if lo.closed else "0", "1" if hi.closed else "0"]
    return coords + flags


def write_dataset(boxes: Iterable[ObservationBox], fh: IO[str], d: int | None = None,
                  comment: str | None = None) -> None:
    """Write boxes with explicit closure flags."""
    boxes = list(boxes)
    if d is None:
        d = boxes[0].d if boxes else 1
    if comment:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
    fh.write(f"dim {d}\n")
    for b in boxes:
        fh.write(" ".join(_box_fields(b)) + "\n")


def write_canonical(boxes: Iterable, fh: IO[str], d: int, comment: str | None = None) -> None:
    """Write canonical ``(lo, hi]`` boxes; default closures apply."""
    if comment:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
    fh.write(f"dim {d} canonical\n")
    for b in boxes:
        fh.write(" ".join(f"{lo} {hi}" for lo, hi in zip(b[0], b[1])) + "\n")


def write_clique_supports(cliques: Sequence[Sequence[int]], n: int, fh: IO[str]) -> None:
    """Row-support list, ``j: i1 i2 ...`` with 1-based indices."""
    fh.write(f"cliques m={len(cliques)} n={n}\n")
    for j, c in enumerate(cliques, start=1):
        fh.write(f"{j}: " + " ".join(str(i) for i in c) + "\n")


def write_clique_dense(cm: CliqueMatrix, fh: IO[str]) -> None:
    for row in cm.dense():
        fh.write(",".join("1" if v else "0" for v in row) + "\n")


def read_clique_matrix(source, path=None) -> CliqueMatrix:
    """Read either the row-support format or a dense 0/1 CSV."""
    if isinstance(source, (str, Path)):
        path = str(source)
        with open(source, encoding="utf-8") as fh:
            return read_clique_matrix(fh.readlines(), path)
    lines = [(k, raw.split("#", 1)[0].strip()) for k, raw in enumerate(source, start=1)]
    lines = [(k, s) for k, s in lines if s]
    if not lines:
        raise ParseError("empty clique matrix file", None, path)
    m = n = None
    if lines[0][1].startswith("cliques"):
        k, head = lines.pop(0)
        for tok in head.split()[1:]:
            key, _, val = tok.partition("=")
            try:
                if key == "m":
                    m = int(val)
                elif key == "n":
                    n = int(val)
                else:
                    raise ValueError
            except ValueError:
                raise ParseError(f"bad header field {tok!r}", k, path) from None
    if lines and ":" in lines[0][1]:
        supports = []
        for k, s in lines:
            label, sep, rest = s.partition(":")
            try:
                if not sep or int(label) != len(supports) + 1:
                    raise ValueError
                idx = [int(t) for t in _split(rest)]
            except ValueError:
                raise ParseError(f"expected '{len(supports) + 1}: i1 i2 ...'", k, path) from None
            if any(i < 1 for i in idx):
                raise ParseError("observation indices are 1-based", k, path)
            supports.append(np.array(idx, dtype=np.int64) - 1)
        if m is not None and m != len(supports):
            raise ParseError(f"header says m={m}, found {len(supports)} rows", None, path)
        width = max((int(s.max()) + 1 for s in supports if s.size), default=0)
        if n is None:
            n = width
        elif width > n:
            raise ParseError(f"index {width} exceeds n={n}", None, path)
        return CliqueMatrix.from_supports(supports, n)
    rows = []
    for k, s in lines:
        toks = _split(s)
        if any(t not in ("0", "1") for t in toks):
            raise ParseError("dense clique matrix entries must be 0 or 1", k, path)
        if rows and len(toks) != len(rows[0]):
            raise ParseError("ragged dense clique matrix", k, path)
        rows.append([t == "1" for t in toks])
    return CliqueMatrix.from_dense(rows)


def read_alpha(source, path=None) -> np.ndarray:
    """Mass vector: numbers separated by whitespace, commas or newlines."""
    if isinstance(source, (str, Path)):
        path = str(source)
        with open(source, encoding="utf-8") as fh:
            return read_alpha(fh.readlines(), path)
    vals = []
    for k, raw in enumerate(source, start=1):
        for tok in _split(raw.split("#", 1)[0]):
            try:
                vals.append(float(tok))
            except ValueError:
                raise ParseError(f"not a number: {tok!r}", k, path) from None
    return np.array(vals, dtype=np.float64)
