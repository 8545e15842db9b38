"""Bootstrap reliability of minimal-spanning-tree links.

Each replica resamples entire time points (rows) with replacement,
keeping the cross-entity structure of every sampled observation intact,
then rebuilds correlation -> distance -> MST. A link's reliability is
the fraction of non-degenerate replicas whose MST contains that link.

Randomness comes from a counter-based Philox generator keyed per replica
by (seed, replica index), so replicas can be evaluated in any order or
split across workers and the tallies still match a serial run exactly.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from .errors import DataValidationError
from .metric import correlation_matrix, distance_matrix
from .panel import ReturnPanel
from .tree import SpanningTree, kruskal_mst

RNG_ALGORITHM = "philox4x64 keyed by (seed, replica)"

# A replica is degenerate when resampling leaves some column constant.
# If more than this fraction degenerate, the panel is too short or too
# flat for the bootstrap to mean anything; fail instead of reporting.
MAX_DEGENERATE_FRACTION = 0.10


@dataclass(frozen=True)
class BootstrapConfig:
    replicas: int = 1600
    seed: int = 0

    def __post_init__(self) -> None:
        if self.replicas < 1:
            raise DataValidationError(f"replicas must be >= 1, got {self.replicas}")
        if not 0 <= self.seed < 2**64:
            raise DataValidationError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class BootstrapReport:
    """Per-link survival fractions for the links of the original MST."""

    config: BootstrapConfig
    rng: str
    degenerate_replicas: int
    link_reliability: dict[tuple[str, str], float]

    @property
    def valid_replicas(self) -> int:
        return self.config.replicas - self.degenerate_replicas

    def to_json_obj(self, *, decimals: int | None = None) -> dict[str, Any]:
        fmt = (lambda v: float(v)) if decimals is None else (lambda v: round(v, decimals))
        return {
            "replicas": self.config.replicas,
            "seed": self.config.seed,
            "rng": self.rng,
            "degenerate": self.degenerate_replicas,
            "links": [
                {"a": a, "b": b, "reliability": fmt(value)}
                for (a, b), value in sorted(self.link_reliability.items())
            ],
        }

    def to_json(self, *, decimals: int | None = None) -> str:
        return json.dumps(self.to_json_obj(decimals=decimals), indent=2) + "\n"


def replica_stream(seed: int, replica: int) -> np.random.Generator:
    """Independent random stream for one replica of one run."""
    key = np.array([seed, replica], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def resample_rows(returns: ReturnPanel, rng: np.random.Generator) -> ReturnPanel:
    """Rows drawn uniformly with replacement; output row count equals input's."""
    rows = returns.values.shape[0]
    idx = rng.integers(0, rows, size=rows)
    return ReturnPanel(symbols=returns.symbols, values=returns.values[idx])


def _replica_links(returns: ReturnPanel, seed: int, replica: int) -> frozenset | None:
    """MST link set of one resample, or None when the resample is degenerate."""
    rng = replica_stream(seed, replica)
    idx = rng.integers(0, returns.n_rows, size=returns.n_rows)
    sample = returns.values[idx]
    if (sample.max(axis=0) == sample.min(axis=0)).any():
        return None
    try:
        corr = correlation_matrix(ReturnPanel(symbols=returns.symbols, values=sample))
    except DataValidationError:
        return None
    return frozenset(kruskal_mst(distance_matrix(corr)).links())


def _count_chunk(
    returns: ReturnPanel,
    original: tuple[tuple[str, str], ...],
    seed: int,
    replicas: Iterable[int],
) -> tuple[dict[tuple[str, str], int], int]:
    counts = {link: 0 for link in original}
    degenerate = 0
    for replica in replicas:
        links = _replica_links(returns, seed, replica)
        if links is None:
            degenerate += 1
            continue
        for link in original:
            if link in links:
                counts[link] += 1
    return counts, degenerate


def link_reliability(
    returns: ReturnPanel, config: BootstrapConfig, *, jobs: int = 1
) -> tuple[SpanningTree, BootstrapReport]:
    """Original-panel MST plus the fraction of replicas preserving each link.

    Replicas whose resample leaves a constant column are discarded and
    counted; fractions are over the remaining replicas. `jobs` only
    schedules work: any value produces the identical report.
    """
    base_tree = kruskal_mst(distance_matrix(correlation_matrix(returns)))
    original = base_tree.links()

    if jobs <= 1:
        chunks = [range(config.replicas)]
    else:
        step = -(-config.replicas // jobs)
        chunks = [
            range(start, min(start + step, config.replicas))
            for start in range(0, config.replicas, step)
        ]

    def work(chunk: range) -> tuple[dict[tuple[str, str], int], int]:
        return _count_chunk(returns, original, config.seed, chunk)

    if len(chunks) == 1:
        results = [work(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(work, chunks))

    counts = {link: 0 for link in original}
    degenerate = 0
    for chunk_counts, chunk_degenerate in results:
        degenerate += chunk_degenerate
        for link, count in chunk_counts.items():
            counts[link] += count

    if degenerate > MAX_DEGENERATE_FRACTION * config.replicas:
        raise DataValidationError(
            f"{degenerate} of {config.replicas} bootstrap replicas degenerate "
            f"(constant column after resampling); panel too short or too flat"
        )

    valid = config.replicas - degenerate
    reliability = {link: counts[link] / valid for link in original}
    report = BootstrapReport(
        config=config,
        rng=RNG_ALGORITHM,
        degenerate_replicas=degenerate,
        link_reliability=reliability,
    )
    return base_tree.with_reliability(reliability), report
