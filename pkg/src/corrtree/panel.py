"""Time-series panel ingestion, windowing, and log-returns.

A panel is a T x N matrix of strictly positive levels (one column per
entity, one row per period). Levels must be positive because every
downstream statistic is computed on log-returns.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .errors import DataValidationError


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=np.float64)
    out.setflags(write=False)
    return out


def _check_symbols(symbols: tuple[str, ...], minimum: int = 2) -> None:
    if len(symbols) < minimum:
        raise DataValidationError(f"need at least {minimum} entities, got {len(symbols)}")
    seen: set[str] = set()
    for s in symbols:
        if not s:
            raise DataValidationError("empty entity symbol")
        if s in seen:
            raise DataValidationError(f"duplicate entity symbol {s!r}")
        seen.add(s)


@dataclass(frozen=True)
class TimeSeriesPanel:
    """Aligned matrix of positive levels, shape (T periods x N entities).

    Instances are immutable: the value matrix is a read-only float64
    array, safe to share across threads.
    """

    symbols: tuple[str, ...]
    time_labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "time_labels", tuple(self.time_labels))
        _check_symbols(self.symbols)
        if len(self.time_labels) < 3:
            raise DataValidationError(
                f"need at least 3 periods (2 returns), got {len(self.time_labels)}"
            )
        seen: set[str] = set()
        for label in self.time_labels:
            if not label:
                raise DataValidationError("empty period label")
            if label in seen:
                raise DataValidationError(f"duplicate period label {label!r}")
            seen.add(label)
        values = np.asarray(self.values, dtype=np.float64)
        expected = (len(self.time_labels), len(self.symbols))
        if values.shape != expected:
            raise DataValidationError(f"value matrix is {values.shape}, expected {expected}")
        bad = ~(np.isfinite(values) & (values > 0.0))
        if bad.any():
            t, i = map(int, np.argwhere(bad)[0])
            raise DataValidationError(
                f"non-positive or non-finite value {float(values[t, i])!r} at "
                f"row {t + 1} ({self.time_labels[t]!r}), column {self.symbols[i]!r}"
            )
        object.__setattr__(self, "values", _freeze(values))

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_entities(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ReturnPanel:
    """Log-return series per entity, shape (T-1 x N). Immutable."""

    symbols: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        _check_symbols(self.symbols)
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(self.symbols):
            raise DataValidationError(
                f"return matrix is {values.shape}, expected (*, {len(self.symbols)})"
            )
        if values.shape[0] < 1:
            raise DataValidationError("return panel needs at least one row")
        if not np.isfinite(values).all():
            raise DataValidationError("return panel contains non-finite values")
        object.__setattr__(self, "values", _freeze(values))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]


def load_panel(source: str | Path | IO[str], *, delimiter: str = ",") -> TimeSeriesPanel:
    """Parse a delimited text table into a validated panel.

    Layout: header row whose first cell is ignored and whose remaining
    cells are entity symbols; each following row is one period, first
    cell the period label, the rest positive decimal levels. Rows must
    appear in chronological order. Column order is preserved.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as handle:
            return load_panel(handle, delimiter=delimiter)

    rows = list(csv.reader(source, delimiter=delimiter))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataValidationError("empty input table")

    header = [cell.strip() for cell in rows[0]]
    if len(header) < 3:
        raise DataValidationError("header must name at least 2 entity columns")
    symbols = tuple(header[1:])
    _check_symbols(symbols)

    labels: list[str] = []
    data: list[list[float]] = []
    for r, row in enumerate(rows[1:], start=1):
        cells = [cell.strip() for cell in row]
        if len(cells) != len(header):
            raise DataValidationError(
                f"row {r} has {len(cells)} cells, expected {len(header)}"
            )
        labels.append(cells[0])
        parsed: list[float] = []
        for symbol, cell in zip(symbols, cells[1:]):
            # float() is too permissive here: no "1_000", no inf/nan.
            try:
                if "_" in cell:
                    raise ValueError
                value = float(cell)
            except ValueError:
                raise DataValidationError(
                    f"non-numeric value {cell!r} at row {r}, column {symbol!r}"
                ) from None
            if not math.isfinite(value):
                raise DataValidationError(
                    f"non-finite value {cell!r} at row {r}, column {symbol!r}"
                )
            if not value > 0.0:
                raise DataValidationError(
                    f"non-positive value {cell!r} at row {r}, column {symbol!r}"
                )
            parsed.append(value)
        data.append(parsed)

    if len(data) < 3:
        raise DataValidationError(f"need at least 3 data rows, got {len(data)}")
    return TimeSeriesPanel(symbols=symbols, time_labels=tuple(labels), values=np.array(data))


def dump_panel(panel: TimeSeriesPanel, *, delimiter: str = ",", decimals: int = 6) -> str:
    """Serialize a panel back to the delimited layout accepted by load_panel."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["period", *panel.symbols])
    for label, row in zip(panel.time_labels, panel.values):
        writer.writerow([label, *(f"{v:.{decimals}f}" for v in row)])
    return out.getvalue()


def slice_window(panel: TimeSeriesPanel, start: str, end: str) -> TimeSeriesPanel:
    """Contiguous sub-panel between two period labels, inclusive."""
    positions = {label: t for t, label in enumerate(panel.time_labels)}
    for label in (start, end):
        if label not in positions:
            raise DataValidationError(f"period label {label!r} not in panel")
    lo, hi = positions[start], positions[end]
    if lo > hi:
        raise DataValidationError(f"window start {start!r} comes after end {end!r}")
    if hi - lo + 1 < 3:
        raise DataValidationError(
            f"window {start!r}..{end!r} spans {hi - lo + 1} periods, need at least 3"
        )
    return TimeSeriesPanel(
        symbols=panel.symbols,
        time_labels=panel.time_labels[lo : hi + 1],
        values=panel.values[lo : hi + 1],
    )


def log_returns(panel: TimeSeriesPanel) -> ReturnPanel:
    """Per-entity log-returns: row t is ln(level[t+1]) - ln(level[t])."""
    logs = np.log(panel.values)
    return ReturnPanel(symbols=panel.symbols, values=logs[1:] - logs[:-1])

