"""Minimal spanning tree over a distance matrix and derived path-max distances.

Kruskal's algorithm with deterministic tie-breaking: candidate edges are
ordered by (weight, lexicographic endpoint pair), so identical inputs
always produce identical trees, including under tied weights. That
determinism is what makes "the same link" well-defined when counting
link survival across bootstrap replicas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DataValidationError
from .metric import DistanceMatrix, LabelledMatrix


class _DisjointSet:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class Edge:
    """Undirected weighted link; endpoints stored with a < b lexicographically."""

    a: str
    b: str
    weight: float
    reliability: float | None = None

    def __post_init__(self) -> None:
        if self.a >= self.b:
            raise DataValidationError(f"edge endpoints not in canonical order: {self.a!r}, {self.b!r}")
        if self.reliability is not None and not 0.0 <= self.reliability <= 1.0:
            raise DataValidationError(f"reliability {self.reliability} outside [0, 1]")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True)
class SpanningTree:
    """N-1 edges forming a connected acyclic graph over the symbols.

    Edges are sorted by (weight, a, b); the optional reliability field
    holds the bootstrap fraction for each link.
    """

    symbols: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "edges", tuple(self.edges))
        n = len(self.symbols)
        if n < 2:
            raise DataValidationError("need at least 2 entities")
        if len(self.edges) != n - 1:
            raise DataValidationError(f"{len(self.edges)} edges for {n} entities, expected {n - 1}")
        index = {s: i for i, s in enumerate(self.symbols)}
        dsu = _DisjointSet(n)
        for e in self.edges:
            if e.a not in index or e.b not in index:
                raise DataValidationError(f"edge {e.a}-{e.b} references unknown symbol")
            if not dsu.union(index[e.a], index[e.b]):
                raise DataValidationError(f"edge {e.a}-{e.b} creates a cycle")
        keys = [(e.weight, e.a, e.b) for e in self.edges]
        if keys != sorted(keys):
            raise DataValidationError("edges not sorted by (weight, a, b)")

    def links(self) -> tuple[tuple[str, str], ...]:
        return tuple(e.pair for e in self.edges)

    def with_reliability(self, reliability: dict[tuple[str, str], float]) -> "SpanningTree":
        """Copy of the tree with each edge annotated from a pair -> fraction map."""
        edges = tuple(
            Edge(e.a, e.b, e.weight, reliability=reliability[e.pair]) for e in self.edges
        )
        return SpanningTree(symbols=self.symbols, edges=edges)

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "symbols": list(self.symbols),
            "edges": [
                {
                    "a": e.a,
                    "b": e.b,
                    "weight": round(e.weight, 6),
                    "boot": None if e.reliability is None else round(e.reliability, 6),
                }
                for e in self.edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    def to_dot(self, name: str = "mst") -> str:
        """Graphviz undirected graph; weight and boot as edge attributes."""
        lines = [f"graph {name} {{"]
        for e in self.edges:
            attrs = f"weight={e.weight:.6f}"
            if e.reliability is not None:
                attrs += f", boot={e.reliability:.6f}"
            lines.append(f'  "{e.a}" -- "{e.b}" [{attrs}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class UltrametricMatrix(LabelledMatrix):
    """Path-max distances; satisfies values[i][j] <= max(values[i][k],
    values[k][j]) for every triple (checked in tests, not here)."""

    def _check_entries(self, values: np.ndarray) -> None:
        if not np.all(np.diagonal(values) == 0.0):
            raise DataValidationError("ultrametric diagonal must be exactly 0")
        if values.min() < 0.0:
            raise DataValidationError("ultrametric entries must be >= 0")


def _pair_table(symbols: tuple[str, ...]) -> list[tuple[str, str, int, int]]:
    """All unordered pairs as (a, b, i, j), sorted by the canonical (a, b)."""
    n = len(symbols)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = symbols[i], symbols[j]
            if a < b:
                pairs.append((a, b, i, j))
            else:
                pairs.append((b, a, j, i))
    pairs.sort(key=lambda p: (p[0], p[1]))
    return pairs


def _mst_pair_ranks(values: np.ndarray, pairs: list[tuple[str, str, int, int]], n: int) -> list[int]:
    """Kruskal over precomputed pairs; returns accepted ranks into `pairs`.

    Rank order encodes the lexicographic endpoint pair, so sorting by
    (weight, rank) realizes the documented tie-break. Accepted ranks come
    out ordered by that same key.
    """
    order = sorted(range(len(pairs)), key=lambda r: (values[pairs[r][2], pairs[r][3]], r))
    dsu = _DisjointSet(n)
    accepted: list[int] = []
    for r in order:
        _, _, i, j = pairs[r]
        if dsu.union(i, j):
            accepted.append(r)
            if len(accepted) == n - 1:
                break
    return accepted


def kruskal_mst(dist: DistanceMatrix) -> SpanningTree:
    """Minimum spanning tree of the complete distance graph."""
    pairs = _pair_table(dist.symbols)
    ranks = _mst_pair_ranks(dist.values, pairs, dist.n_entities)
    edges = tuple(
        Edge(pairs[r][0], pairs[r][1], float(dist.values[pairs[r][2], pairs[r][3]]))
        for r in ranks
    )
    return SpanningTree(symbols=dist.symbols, edges=edges)


def subdominant_ultrametric(tree: SpanningTree) -> UltrametricMatrix:
    """Path-max distance: entry (i, j) is the largest edge weight on the
    unique tree path between i and j."""
    n = len(tree.symbols)
    index = {s: i for i, s in enumerate(tree.symbols)}
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for e in tree.edges:
        i, j = index[e.a], index[e.b]
        adjacency[i].append((j, e.weight))
        adjacency[j].append((i, e.weight))

    out = np.zeros((n, n))
    for source in range(n):
        seen = [False] * n
        seen[source] = True
        stack = [(source, 0.0)]
        while stack:
            node, running_max = stack.pop()
            for neighbor, weight in adjacency[node]:
                if not seen[neighbor]:
                    seen[neighbor] = True
                    path_max = running_max if running_max >= weight else weight
                    out[source, neighbor] = path_max
                    stack.append((neighbor, path_max))
    return UltrametricMatrix(symbols=tree.symbols, values=out)


def tree_length(tree: SpanningTree) -> float:
    """Sum of edge weights."""
    return float(sum(e.weight for e in tree.edges))
