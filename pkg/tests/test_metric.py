import json
import logging
import math

import numpy as np
import pytest

from corrtree.errors import DataValidationError
from corrtree.metric import (
    CorrelationMatrix,
    DistanceMatrix,
    correlation_matrix,
    distance_matrix,
)
from corrtree.panel import ReturnPanel, TimeSeriesPanel, log_returns

from conftest import make_symbols, quarter_labels, random_returns


def _returns(columns: dict[str, list[float]]) -> ReturnPanel:
    symbols = tuple(columns)
    values = np.column_stack([columns[s] for s in symbols])
    return ReturnPanel(symbols, values)


class TestCorrelation:
    def test_identical_columns(self):
        corr = correlation_matrix(_returns({"A": [1, 2, 3], "B": [1, 2, 3]}))
        assert corr.entry("A", "B") == 1.0

    def test_negated_column(self):
        corr = correlation_matrix(_returns({"A": [1, 2, 3], "B": [-1, -2, -3]}))
        assert corr.entry("A", "B") == -1.0

    def test_hand_computed_half(self):
        # x=(1,2,3), y=(1,3,2): cov=1/3, var_x=var_y=2/3, so C=0.5.
        corr = correlation_matrix(_returns({"A": [1, 2, 3], "B": [1, 3, 2]}))
        assert corr.entry("A", "B") == pytest.approx(0.5, abs=1e-15)

    def test_diagonal_exactly_one(self):
        rng = np.random.default_rng(3)
        corr = correlation_matrix(random_returns(rng, 5, 20))
        np.testing.assert_array_equal(np.diagonal(corr.values), 1.0)

    def test_zero_variance_names_symbol(self):
        with pytest.raises(DataValidationError, match="'B'"):
            correlation_matrix(_returns({"A": [1, 2, 3], "B": [4, 4, 4]}))

    def test_single_row_rejected(self):
        with pytest.raises(DataValidationError, match="2 return rows"):
            correlation_matrix(ReturnPanel(("A", "B"), [[0.1, 0.2]]))

    def test_symmetric_and_in_range(self):
        rng = np.random.default_rng(4)
        corr = correlation_matrix(random_returns(rng, 8, 30))
        np.testing.assert_array_equal(corr.values, corr.values.T)
        assert corr.values.min() >= -1.0
        assert corr.values.max() <= 1.0

    def test_bit_identical_across_calls(self):
        rng = np.random.default_rng(5)
        returns = random_returns(rng, 7, 25)
        a = correlation_matrix(returns)
        b = correlation_matrix(returns)
        np.testing.assert_array_equal(a.values, b.values)

    def test_multiplicative_scaling_invariance(self):
        rng = np.random.default_rng(6)
        steps = rng.normal(scale=0.05, size=(20, 4))
        levels = 80.0 * np.exp(np.cumsum(steps, axis=0))
        labels = quarter_labels(2000, 20)
        base = TimeSeriesPanel(make_symbols(4), labels, levels)
        scaled = TimeSeriesPanel(make_symbols(4), labels, 3.7 * levels)
        c_base = correlation_matrix(log_returns(base))
        c_scaled = correlation_matrix(log_returns(scaled))
        np.testing.assert_allclose(c_scaled.values, c_base.values, atol=1e-12)

    def test_clamp_logs_only_beyond_rounding_noise(self, caplog):
        from corrtree.metric import _clamp_unit_interval

        noisy = np.array([[1.0, 1.0 + 1e-6], [1.0 + 1e-6, 1.0]])
        with caplog.at_level(logging.WARNING, logger="corrtree.metric"):
            clamped = _clamp_unit_interval(noisy)
        assert clamped.max() == 1.0
        assert any("clamping" in r.message for r in caplog.records)

        caplog.clear()
        tiny = np.array([[1.0, 1.0 + 1e-15], [1.0 + 1e-15, 1.0]])
        with caplog.at_level(logging.WARNING, logger="corrtree.metric"):
            clamped = _clamp_unit_interval(tiny)
        assert clamped.max() == 1.0
        assert not caplog.records

    def test_collinear_columns_clamp_to_exactly_one(self):
        corr = correlation_matrix(_returns({"A": [0.1, 0.2, 0.4], "B": [0.3, 0.6, 1.2]}))
        assert corr.entry("A", "B") == 1.0


class TestDistance:
    def test_endpoints(self):
        corr = CorrelationMatrix(("A", "B", "C"), np.array([
            [1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]))
        dist = distance_matrix(corr)
        assert dist.entry("A", "B") == 0.0
        assert dist.entry("A", "C") == 2.0

    def test_half_correlation_gives_unit_distance(self):
        corr = CorrelationMatrix(("A", "B"), np.array([[1.0, 0.5], [0.5, 1.0]]))
        assert distance_matrix(corr).entry("A", "B") == pytest.approx(1.0, abs=1e-15)

    def test_diagonal_exactly_zero(self):
        rng = np.random.default_rng(7)
        dist = distance_matrix(correlation_matrix(random_returns(rng, 6, 20)))
        np.testing.assert_array_equal(np.diagonal(dist.values), 0.0)

    def test_monotone_decreasing_in_correlation(self):
        rng = np.random.default_rng(8)
        samples = np.sort(rng.uniform(-1.0, 1.0, size=200))
        d = np.sqrt(2.0 * (1.0 - samples))
        assert np.all(np.diff(d) < 0.0)

    def test_triangle_inequality_on_gaussian_panels(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            dist = distance_matrix(correlation_matrix(random_returns(rng, 6, 30)))
            v = dist.values
            n = len(dist.symbols)
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        assert v[i, j] <= v[i, k] + v[k, j] + 1e-12


class TestMatrixValidation:
    def test_asymmetric_rejected(self):
        with pytest.raises(DataValidationError, match="symmetric"):
            DistanceMatrix(("A", "B"), np.array([[0.0, 0.5], [0.4, 0.0]]))

    def test_bad_correlation_diagonal(self):
        with pytest.raises(DataValidationError, match="diagonal"):
            CorrelationMatrix(("A", "B"), np.array([[0.9, 0.5], [0.5, 1.0]]))

    def test_distance_above_two_rejected(self):
        with pytest.raises(DataValidationError, match="\\[0, 2\\]"):
            DistanceMatrix(("A", "B"), np.array([[0.0, 2.5], [2.5, 0.0]]))


class TestSerialization:
    def _distance(self) -> DistanceMatrix:
        rng = np.random.default_rng(10)
        return distance_matrix(correlation_matrix(random_returns(rng, 4, 20)))

    def test_text_round_trip(self):
        dist = self._distance()
        again = DistanceMatrix.from_text(dist.to_text())
        assert again.symbols == dist.symbols
        np.testing.assert_allclose(again.values, dist.values, atol=5e-7)

    def test_text_layout(self):
        dist = DistanceMatrix(("A", "B"), np.array([[0.0, 0.25], [0.25, 0.0]]))
        assert dist.to_text() == ",A,B\nA,0.000000,0.250000\nB,0.250000,0.000000\n"

    def test_tab_delimited(self):
        dist = DistanceMatrix(("A", "B"), np.array([[0.0, 0.25], [0.25, 0.0]]))
        text = dist.to_text(delimiter="\t")
        assert "\tA\tB\n" in text
        again = DistanceMatrix.from_text(text, delimiter="\t")
        np.testing.assert_array_equal(again.values, dist.values)

    def test_json_round_trip_exact(self):
        dist = self._distance()
        obj = json.loads(dist.to_json())
        again = DistanceMatrix.from_json_obj(obj)
        assert again.symbols == dist.symbols
        np.testing.assert_array_equal(again.values, dist.values)

    def test_correlation_json_round_trip(self):
        rng = np.random.default_rng(11)
        corr = correlation_matrix(random_returns(rng, 3, 15))
        again = CorrelationMatrix.from_json_obj(json.loads(corr.to_json()))
        np.testing.assert_array_equal(again.values, corr.values)


def test_population_moment_form_matches_direct_pearson():
    # Same coefficient whether moments are divided by T or T-1.
    rng = np.random.default_rng(12)
    returns = random_returns(rng, 5, 17)
    ours = correlation_matrix(returns).values
    theirs = np.corrcoef(returns.values, rowvar=False)
    np.testing.assert_allclose(ours, theirs, atol=1e-12)


def test_distance_of_log_return_pipeline():
    # End-to-end: mirrored level paths are perfectly anti-correlated, d=2.
    growth = np.array([1.1, 1.3, 1.05])
    up = 100.0 * np.cumprod(np.concatenate([[1.0], growth]))
    down = 100.0 * np.cumprod(np.concatenate([[1.0], 1.0 / growth]))
    panel = TimeSeriesPanel(("DN", "UP"), ("1", "2", "3", "4"), np.column_stack([down, up]))
    dist = distance_matrix(correlation_matrix(log_returns(panel)))
    assert dist.entry("UP", "DN") == pytest.approx(2.0, abs=1e-7)
    assert math.isclose(dist.values.max(), 2.0, abs_tol=1e-7)
