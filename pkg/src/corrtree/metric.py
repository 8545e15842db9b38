"""Cross-correlation of return series and its metric distance transform.

Correlations use population moments (sums divided by the row count T):
C_ij = (<ri rj> - <ri><rj>) / sqrt((<ri^2> - <ri>^2)(<rj^2> - <rj>^2)).
The distance transform is d_ij = sqrt(2 (1 - C_ij)), which maps
correlation 1 -> 0, 0 -> sqrt(2), -1 -> 2.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DataValidationError
from .panel import ReturnPanel, _freeze

logger = logging.getLogger(__name__)

# |C| may exceed 1 by rounding; overshoot beyond this is logged before clamping.
CLAMP_LOG_THRESHOLD = 1e-9


@dataclass(frozen=True)
class LabelledMatrix:
    """Symmetric N x N matrix with one row/column per entity symbol."""

    symbols: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        n = len(self.symbols)
        if n < 2:
            raise DataValidationError("need at least 2 entities")
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (n, n):
            raise DataValidationError(f"matrix is {values.shape}, expected ({n}, {n})")
        if not np.isfinite(values).all():
            raise DataValidationError("matrix contains non-finite entries")
        if not np.array_equal(values, values.T):
            raise DataValidationError("matrix is not symmetric")
        self._check_entries(values)
        object.__setattr__(self, "values", _freeze(values))

    def _check_entries(self, values: np.ndarray) -> None:
        """Subclasses tighten entry/diagonal constraints here."""

    @property
    def n_entities(self) -> int:
        return len(self.symbols)

    def entry(self, a: str, b: str) -> float:
        i, j = self.symbols.index(a), self.symbols.index(b)
        return float(self.values[i, j])

    def to_text(self, *, delimiter: str = ",", decimals: int = 6) -> str:
        """Delimited table with symbols as header row and first column."""
        out = io.StringIO()
        writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
        writer.writerow(["", *self.symbols])
        for symbol, row in zip(self.symbols, self.values):
            writer.writerow([symbol, *(f"{v:.{decimals}f}" for v in row)])
        return out.getvalue()

    def to_json_obj(self) -> dict[str, Any]:
        return {"symbols": list(self.symbols), "rows": [list(map(float, r)) for r in self.values]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    @classmethod
    def from_text(cls, text: str, *, delimiter: str = ","):
        rows = [row for row in csv.reader(io.StringIO(text), delimiter=delimiter) if row]
        if len(rows) < 2:
            raise DataValidationError("matrix table needs a header and data rows")
        symbols = tuple(cell.strip() for cell in rows[0][1:])
        values = []
        for row in rows[1:]:
            if row[0].strip() not in symbols:
                raise DataValidationError(f"unexpected row label {row[0]!r}")
            values.append([float(cell) for cell in row[1:]])
        return cls(symbols=symbols, values=np.array(values))

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]):
        return cls(symbols=tuple(obj["symbols"]), values=np.array(obj["rows"], dtype=np.float64))


class CorrelationMatrix(LabelledMatrix):
    """Pairwise correlations in [-1, 1] with unit diagonal."""

    def _check_entries(self, values: np.ndarray) -> None:
        if not np.all(np.diagonal(values) == 1.0):
            raise DataValidationError("correlation diagonal must be exactly 1")
        if values.min() < -1.0 or values.max() > 1.0:
            raise DataValidationError("correlation entries must lie in [-1, 1]")


class DistanceMatrix(LabelledMatrix):
    """Pairwise distances in [0, 2] with zero diagonal."""

    def _check_entries(self, values: np.ndarray) -> None:
        if not np.all(np.diagonal(values) == 0.0):
            raise DataValidationError("distance diagonal must be exactly 0")
        if values.min() < 0.0 or values.max() > 2.0:
            raise DataValidationError("distance entries must lie in [0, 2]")


def correlation_matrix(returns: ReturnPanel) -> CorrelationMatrix:
    """Pairwise correlation of return columns.

    Rejects any column with zero sample variance (a constant series has
    no defined correlation) rather than emitting NaN. Results are clamped
    to [-1, 1]; overshoot beyond rounding noise is logged.
    """
    values = returns.values
    t = values.shape[0]
    if t < 2:
        raise DataValidationError("need at least 2 return rows to correlate")

    constant = values.max(axis=0) == values.min(axis=0)
    if constant.any():
        symbol = returns.symbols[int(np.argmax(constant))]
        raise DataValidationError(f"zero-variance return series for {symbol!r}")

    centered = values - values.mean(axis=0)
    # einsum keeps a fixed per-pair accumulation order (no BLAS dispatch),
    # so results are identical regardless of thread count or call order.
    moments = np.einsum("ti,tj->ij", centered, centered) / t
    var = np.diagonal(moments)
    if var.min() <= 0.0:
        symbol = returns.symbols[int(np.argmin(var))]
        raise DataValidationError(f"zero-variance return series for {symbol!r}")

    corr = _clamp_unit_interval(moments / np.outer(np.sqrt(var), np.sqrt(var)))
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(symbols=returns.symbols, values=corr)


def _clamp_unit_interval(raw: np.ndarray) -> np.ndarray:
    """Clip rounding overshoot into [-1, 1], logging anything beyond noise."""
    overshoot = float(np.abs(raw).max()) - 1.0
    if overshoot > CLAMP_LOG_THRESHOLD:
        logger.warning("clamping correlation overshoot of %.3e into [-1, 1]", overshoot)
    return np.clip(raw, -1.0, 1.0)


def distance_matrix(corr: CorrelationMatrix) -> DistanceMatrix:
    """Distance transform d = sqrt(2 (1 - C)) with an exactly-zero diagonal."""
    d = np.sqrt(2.0 * (1.0 - corr.values))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(symbols=corr.symbols, values=d)
