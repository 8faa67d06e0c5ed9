"""Cause-effect pair data model and plain-text corpus ingestion.

Pair files are UTF-8 text with one sample per line and whitespace-separated
numeric columns. Blank lines and lines starting with ``#`` are skipped; all
other lines must parse. Only the columns named by the caller (by default the
first two) are used; extra columns are ignored.

A meta file describes a directory of pair files, six whitespace-separated
fields per row::

    pair-id  cause-col-start  cause-col-end  effect-col-start  effect-col-end  weight

Column indices are 1-based. Rows whose cause or effect spans more than one
column describe multivariate pairs; those are skipped and reported, since
only scalar pairs are supported.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import EmptyFile, MalformedLine, MetaMismatch


class Direction(Enum):
    """Causal orientation of a pair: the first variable causes the second, or vice versa."""

    X_TO_Y = "x->y"
    Y_TO_X = "y->x"

    def flipped(self) -> "Direction":
        return Direction.Y_TO_X if self is Direction.X_TO_Y else Direction.X_TO_Y


@dataclass(frozen=True)
class CauseEffectPair:
    """Two aligned real-valued sample vectors with optional ground truth.

    ``weight`` is the dataset weight used by weighted accuracy; ``truth`` is
    the ground-truth direction, or None for unlabeled data. Arrays are
    defensively copied and marked read-only, so instances are safe to share.
    """

    id: str
    x: np.ndarray
    y: np.ndarray
    weight: float = 1.0
    truth: Direction | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        y = np.asarray(self.y, dtype=float).copy()
        if x.ndim != 1 or y.ndim != 1:
            raise ValueError("x and y must be one-dimensional")
        if len(x) != len(y):
            raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
        if len(x) < 2:
            raise ValueError("a pair needs at least 2 samples")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("all values must be finite")
        if not (self.weight >= 0.0):
            raise ValueError("weight must be >= 0")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return len(self.x)

    def swapped(self) -> "CauseEffectPair":
        """The same samples with the roles of x and y exchanged."""
        truth = self.truth.flipped() if self.truth is not None else None
        return replace(self, x=self.y, y=self.x, truth=truth)


@dataclass(frozen=True)
class Decision:
    """Outcome of a direction decision.

    ``direction`` is None when no decision was made. The two error fields
    hold the per-direction test errors (mean squared errors for regression
    based methods; positive surrogate scores for other methods), and
    ``confidence`` is ``1 - min(error)/max(error)`` whenever both errors are
    positive, else 0.
    """

    direction: Direction | None
    mse_y_given_x: float
    mse_x_given_y: float
    confidence: float

    def __post_init__(self):
        if not (self.mse_y_given_x >= 0.0 and self.mse_x_given_y >= 0.0):
            raise ValueError("errors must be >= 0")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError("confidence must lie in [0, 1]")


def _parse_rows(path: Path) -> list[list[float]]:
    """Parse a pair file into rows of floats; physical line numbers drive errors."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) < 2:
                raise MalformedLine(line_no, "fewer than 2 columns")
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise MalformedLine(line_no, f"non-numeric field in {fields!r}") from None
            if not all(np.isfinite(values)):
                raise MalformedLine(line_no, "non-finite value")
            rows.append(values)
    return rows


def load_pair(path: str | Path, x_col: int = 1, y_col: int = 2) -> CauseEffectPair:
    """Load a scalar pair from a whitespace-separated text file.

    ``x_col`` and ``y_col`` are 1-based column indices (defaults: first two
    columns). Raises MalformedLine for unparsable rows and EmptyFile when
    fewer than two data rows remain.
    """
    path = Path(path)
    rows = _parse_rows(path)
    if len(rows) < 2:
        raise EmptyFile(f"{path}: found {len(rows)} data rows, need at least 2")
    width = min(len(r) for r in rows)
    if width < max(x_col, y_col):
        raise MalformedLine(0, f"file has {width} columns, need {max(x_col, y_col)}")
    x = np.array([r[x_col - 1] for r in rows])
    y = np.array([r[y_col - 1] for r in rows])
    return CauseEffectPair(id=path.stem, x=x, y=y)


def save_pair(pair: CauseEffectPair, path: str | Path) -> None:
    """Write a pair in the two-column text format; round-trips through load_pair."""
    with open(path, "w", encoding="utf-8") as fh:
        for xi, yi in zip(pair.x, pair.y):
            fh.write(f"{xi:.17g} {yi:.17g}\n")


def _resolve_pair_file(directory: Path, pair_id: str) -> Path | None:
    for name in (f"{pair_id}.txt", f"pair{pair_id}.txt", pair_id):
        candidate = directory / name
        if candidate.is_file():
            return candidate
    return None


def load_dataset(
    directory: str | Path, meta: str | Path
) -> tuple[list[CauseEffectPair], list[str]]:
    """Load all scalar pairs described by a meta file.

    Returns ``(pairs, skipped_ids)``: pairs oriented so that x is the cause
    (truth is always X_TO_Y) with the weight taken from the meta row, and the
    ids of multivariate rows that were skipped. A meta row naming a missing
    pair file raises MetaMismatch.
    """
    directory = Path(directory)
    pairs: list[CauseEffectPair] = []
    skipped: list[str] = []
    with open(meta, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 6:
                raise MalformedLine(line_no, f"meta row needs 6 fields, got {len(fields)}")
            pair_id = fields[0]
            try:
                cs, ce, es, ee = (int(float(f)) for f in fields[1:5])
                weight = float(fields[5])
            except ValueError:
                raise MalformedLine(line_no, f"non-numeric meta field in {fields!r}") from None
            if cs != ce or es != ee:
                skipped.append(pair_id)
                continue
            pair_file = _resolve_pair_file(directory, pair_id)
            if pair_file is None:
                raise MetaMismatch(f"meta line {line_no}: no pair file for id {pair_id!r}")
            loaded = load_pair(pair_file, x_col=cs, y_col=es)
            pairs.append(
                replace(loaded, id=pair_id, weight=weight, truth=Direction.X_TO_Y)
            )
    return pairs, skipped


def subsample(pair: CauseEffectPair, n: int, seed: int) -> CauseEffectPair:
    """Uniformly subsample ``n`` aligned rows without replacement.

    Returns the pair unchanged when it already has at most ``n`` rows.
    Deterministic given the seed; surviving rows keep their original order.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if len(pair) <= n:
        return pair
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(len(pair), size=n, replace=False))
    return replace(pair, x=pair.x[keep], y=pair.y[keep])
