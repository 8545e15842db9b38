"""Agglomerative hierarchies over a distance matrix.

Single linkage merges at the minimum cross-cluster distance; its
cophenetic distances coincide with the subdominant ultrametric of the
minimal spanning tree. Average linkage merges at the unweighted
arithmetic mean over all cross-cluster entity pairs and is maintained
incrementally via the Lance-Williams size-weighted update.

Tie-break: among pairs at the same inter-cluster distance, merge the one
whose canonical (sorted symbol tuple) pair compares lexicographically
smallest. Merge records therefore do not depend on input column order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DataValidationError
from .metric import DistanceMatrix

METHODS = ("single", "average")

# Newick reserved characters that force quoting of a leaf name.
_NEWICK_SPECIALS = set("():,;'\" \t\n")


@dataclass(frozen=True)
class Merge:
    """One agglomeration step. left/right reference a leaf (0..N-1) or an
    earlier merge (N + merge index); left has the lexicographically
    smaller member set."""

    left: int
    right: int
    height: float


@dataclass(frozen=True)
class Dendrogram:
    """Full merge history: N-1 merges with non-decreasing heights."""

    symbols: tuple[str, ...]
    merges: tuple[Merge, ...]
    method: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "merges", tuple(self.merges))
        n = len(self.symbols)
        if self.method not in METHODS:
            raise DataValidationError(f"unknown linkage method {self.method!r}")
        if len(self.merges) != n - 1:
            raise DataValidationError(f"{len(self.merges)} merges for {n} leaves, expected {n - 1}")
        used: set[int] = set()
        last_height = 0.0
        for k, merge in enumerate(self.merges):
            for ref in (merge.left, merge.right):
                if not 0 <= ref < n + k:
                    raise DataValidationError(f"merge {k} references {ref}, not a leaf or earlier merge")
                if ref in used:
                    raise DataValidationError(f"cluster {ref} consumed twice")
                used.add(ref)
            if merge.height < last_height:
                raise DataValidationError(f"merge heights decrease at step {k}")
            last_height = merge.height

    @property
    def n_leaves(self) -> int:
        return len(self.symbols)

    def leaf_sets(self) -> list[list[int]]:
        """Leaf indices under each node: entries 0..N-1 are leaves, N+k is merge k."""
        n = self.n_leaves
        members: list[list[int]] = [[i] for i in range(n)]
        for merge in self.merges:
            members.append(members[merge.left] + members[merge.right])
        return members

    def to_json_obj(self) -> dict[str, Any]:
        # Heights stay full precision here; rounded copies live only in
        # fixed-width text formats.
        return {
            "method": self.method,
            "symbols": list(self.symbols),
            "merges": [
                {"left": m.left, "right": m.right, "height": float(m.height)} for m in self.merges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"


@dataclass(frozen=True)
class ClusterPartition:
    """Disjoint symbol groups produced by cutting a dendrogram."""

    height: float
    groups: tuple[tuple[str, ...], ...]

    def to_json_obj(self) -> dict[str, Any]:
        return {"height": self.height, "groups": [list(g) for g in self.groups]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"


def _agglomerate(dist: DistanceMatrix, method: str) -> Dendrogram:
    n = dist.n_entities
    symbols = dist.symbols

    canon: dict[int, tuple[str, ...]] = {i: (symbols[i],) for i in range(n)}
    size: dict[int, int] = {i: 1 for i in range(n)}
    gap: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            gap[(i, j)] = float(dist.values[i, j])

    def key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    active = list(range(n))
    merges: list[Merge] = []
    for step in range(n - 1):
        best: tuple[float, tuple[str, ...], tuple[str, ...], int, int] | None = None
        for x in range(len(active)):
            for y in range(x + 1, len(active)):
                i, j = active[x], active[y]
                ci, cj = canon[i], canon[j]
                if cj < ci:
                    ci, cj, i, j = cj, ci, j, i
                candidate = (gap[key(i, j)], ci, cj, i, j)
                if best is None or candidate[:3] < best[:3]:
                    best = candidate
        assert best is not None
        height, _, _, left, right = best

        new = n + step
        merges.append(Merge(left=left, right=right, height=height))
        for k in active:
            if k in (left, right):
                continue
            d_lk = gap.pop(key(left, k))
            d_rk = gap.pop(key(right, k))
            if method == "single":
                merged = d_lk if d_lk <= d_rk else d_rk
            else:
                # Fixed left-then-right operand order keeps results
                # bit-identical under input permutation.
                merged = (size[left] * d_lk + size[right] * d_rk) / (size[left] + size[right])
            gap[key(new, k)] = merged
        gap.pop(key(left, right))
        active = [k for k in active if k not in (left, right)] + [new]
        canon[new] = tuple(sorted(canon[left] + canon[right]))
        size[new] = size[left] + size[right]

    return Dendrogram(symbols=symbols, merges=tuple(merges), method=method)


def single_linkage(dist: DistanceMatrix) -> Dendrogram:
    """Merge history at minimum cross-cluster distance."""
    return _agglomerate(dist, "single")


def average_linkage(dist: DistanceMatrix) -> Dendrogram:
    """Merge history at the mean pairwise cross-cluster distance (UPGMA)."""
    return _agglomerate(dist, "average")


def cophenetic_matrix(dendrogram: Dendrogram) -> np.ndarray:
    """Matrix of first-join heights between every pair of leaves."""
    n = dendrogram.n_leaves
    members = dendrogram.leaf_sets()
    out = np.zeros((n, n))
    for merge in dendrogram.merges:
        for a in members[merge.left]:
            for b in members[merge.right]:
                out[a, b] = merge.height
                out[b, a] = merge.height
    return out


def cut(dendrogram: Dendrogram, height: float) -> ClusterPartition:
    """Groups left after discarding merges above the cut height."""
    if height < 0:
        raise DataValidationError(f"cut height must be >= 0, got {height}")
    n = dendrogram.n_leaves
    members = dendrogram.leaf_sets()
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for merge in dendrogram.merges:
        if merge.height <= height:
            a = find(members[merge.left][0])
            b = find(members[merge.right][0])
            if a != b:
                parent[b] = a

    by_root: dict[int, list[str]] = {}
    for i, symbol in enumerate(dendrogram.symbols):
        by_root.setdefault(find(i), []).append(symbol)
    groups = tuple(sorted((tuple(sorted(g)) for g in by_root.values()), key=lambda g: g[0]))
    return ClusterPartition(height=height, groups=groups)


def _newick_name(symbol: str) -> str:
    if any(c in _NEWICK_SPECIALS for c in symbol):
        return "'" + symbol.replace("'", "''") + "'"
    return symbol


def to_newick(dendrogram: Dendrogram, *, decimals: int = 6) -> str:
    """Single-line Newick; branch length = parent height - child height."""
    n = dendrogram.n_leaves
    merges = dendrogram.merges

    def render(ref: int, parent_height: float) -> str:
        if ref < n:
            label, height = _newick_name(dendrogram.symbols[ref]), 0.0
        else:
            merge = merges[ref - n]
            label = f"({render(merge.left, merge.height)},{render(merge.right, merge.height)})"
            height = merge.height
        return f"{label}:{parent_height - height:.{decimals}f}"

    root = merges[-1]
    return f"({render(root.left, root.height)},{render(root.right, root.height)});\n"
