"""Row readers and writers: dense CSV, sparse triplets, coreset CSV, stats."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import InputFormatError


@dataclass(frozen=True)
class SparseVector:
    """A row of a ``dim``-column sparse matrix, indices strictly increasing."""

    dim: int
    indices: np.ndarray
    values: np.ndarray
    row: Optional[int] = None

    def __post_init__(self):
        idx, val = self.indices, self.values
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ValueError(f"column index out of range for dim {self.dim}")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ValueError("non-finite value in sparse row")

    @classmethod
    def from_pairs(cls, dim, pairs, row=None) -> "SparseVector":
        pairs = sorted(pairs)
        idx = np.array([p[0] for p in pairs], dtype=np.int64)
        val = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(dim, idx, val, row)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def todense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


def _parse_float(tok: str, lineno: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise InputFormatError(f"unparsable number {tok!r}", lineno) from None
    if not math.isfinite(x):
        raise InputFormatError(f"non-finite value {tok!r}", lineno)
    return x


def read_dense_csv(path) -> Iterator[np.ndarray]:
    """Yield rows of a comma-separated numeric file one at a time.

    Blank lines are skipped. All rows must have the width of the first.
    """
    width = None
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not tok.strip() for tok in rec):
                continue
            row = np.array([_parse_float(tok, lineno) for tok in rec])
            if width is None:
                width = row.shape[0]
            elif row.shape[0] != width:
                raise InputFormatError(
                    f"ragged row: {row.shape[0]} values, expected {width}", lineno
                )
            yield row


def read_sparse_triplets(path, dim: int, fill_gaps: bool = False) -> Iterator[SparseVector]:
    """Group whitespace-separated ``row col value`` lines into sparse rows.

    Lines must be sorted by row. With ``fill_gaps`` every missing row index
    between 0 and the last row present is emitted as an empty row.
    """
    current = None
    pairs: dict[int, float] = {}
    next_row = 0

    def flush():
        nonlocal next_row
        if fill_gaps:
            for gap in range(next_row, current):
                yield SparseVector.from_pairs(dim, [], row=gap)
        # explicit zeros are dropped so stored values stay nonzero
        yield SparseVector.from_pairs(dim, [(c, v) for c, v in pairs.items() if v != 0], row=current)
        next_row = current + 1

    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 3:
                raise InputFormatError(f"expected 'row col value', got {line.strip()!r}", lineno)
            try:
                r, c = int(parts[0]), int(parts[1])
            except ValueError:
                raise InputFormatError(f"bad row/column index in {line.strip()!r}", lineno) from None
            v = _parse_float(parts[2], lineno)
            if r < 0 or c < 0:
                raise InputFormatError("negative index", lineno)
            if c >= dim:
                raise InputFormatError(f"column {c} out of range for dim {dim}", lineno)
            if current is not None and r < current:
                raise InputFormatError(f"rows not sorted: {r} after {current}", lineno)
            if r != current:
                if current is not None:
                    yield from flush()
                current, pairs = r, {}
            if c in pairs:
                raise InputFormatError(f"duplicate entry ({r}, {c})", lineno)
            pairs[c] = v
    if current is not None:
        yield from flush()


def write_dense_csv(path, rows: Iterable) -> int:
    n = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for a in rows:
            w.writerow([repr(float(x)) for x in a])
            n += 1
    return n


def write_coreset_csv(path_or_fh, coreset) -> None:
    """Columns ``index,weight,v0..v{d-1}``; floats in shortest round-trip form."""
    header = ["index", "weight"] + [f"v{j}" for j in range(coreset.dim)]

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, a, wt in coreset.items():
            w.writerow([i, repr(wt)] + [repr(float(x)) for x in a])

    if hasattr(path_or_fh, "write"):
        emit(path_or_fh)
    else:
        with open(path_or_fh, "w", newline="") as fh:
            emit(fh)


def read_coreset_csv(path):
    from .coreset import WeightedCoreset

    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        d = len(header) - 2
        idx, wts, rows = [], [], []
        for rec in rd:
            idx.append(int(rec[0]))
            wts.append(float(rec[1]))
            rows.append([float(x) for x in rec[2:]])
    return WeightedCoreset(
        np.array(idx, dtype=np.int64),
        np.array(rows, dtype=np.float64).reshape(len(idx), d),
        np.array(wts, dtype=np.float64),
    )


def write_stats_jsonl(path, stats) -> None:
    with open(path, "w") as fh:
        for rec in stats:
            fh.write(json.dumps(rec.as_dict()) + "\n")


class RowCounter:
    """Wraps a row iterator and records how many rows it has handed out.

    Used to check that consumers pull rows lazily: after the consumer has
    processed ``k`` rows the counter should read ``k`` (or ``k + 1``), never
    the full input length.
    """

    def __init__(self, rows: Iterable):
        self._it = iter(rows)
        self.count = 0

    def __iter__(self):
        return self

    def __next__(self):
        row = next(self._it)
        self.count += 1
        return row
