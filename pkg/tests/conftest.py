"""Shared generators for synthetic panels and matrices."""

from __future__ import annotations

import numpy as np

from corrtree.metric import DistanceMatrix, correlation_matrix, distance_matrix
from corrtree.panel import ReturnPanel, TimeSeriesPanel


def quarter_labels(start_year: int, quarters: int) -> tuple[str, ...]:
    labels = []
    year, quarter = start_year, 1
    for _ in range(quarters):
        labels.append(f"{year}-Q{quarter}")
        quarter += 1
        if quarter > 4:
            quarter, year = 1, year + 1
    return tuple(labels)


def make_symbols(n: int) -> tuple[str, ...]:
    return tuple(f"S{i:02d}" for i in range(n))


def random_levels_panel(
    rng: np.random.Generator, n_entities: int = 6, n_periods: int = 24
) -> TimeSeriesPanel:
    """Positive random-walk levels resembling debt ratios."""
    steps = rng.normal(scale=0.05, size=(n_periods, n_entities))
    levels = 60.0 * np.exp(np.cumsum(steps, axis=0))
    return TimeSeriesPanel(
        symbols=make_symbols(n_entities),
        time_labels=quarter_labels(2000, n_periods),
        values=levels,
    )


def random_returns(
    rng: np.random.Generator, n_entities: int = 6, n_rows: int = 24
) -> ReturnPanel:
    return ReturnPanel(
        symbols=make_symbols(n_entities),
        values=rng.normal(scale=0.05, size=(n_rows, n_entities)),
    )


def random_distance(rng: np.random.Generator, n_entities: int = 6) -> DistanceMatrix:
    """Distance matrix of a random return panel (valid metric by construction)."""
    returns = random_returns(rng, n_entities=n_entities, n_rows=4 * n_entities)
    return distance_matrix(correlation_matrix(returns))
