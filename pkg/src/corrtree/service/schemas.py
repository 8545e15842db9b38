"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..bootstrap import BootstrapReport
from ..linkage import Dendrogram
from ..metric import LabelledMatrix
from ..tree import SpanningTree


class PanelIn(BaseModel):
    """Levels panel as JSON: values[t][i] is entity symbols[i] at time_labels[t]."""

    symbols: list[str]
    time_labels: list[str]
    values: list[list[float]]


class WindowIn(BaseModel):
    start: str
    end: str


class PanelRequest(BaseModel):
    panel: PanelIn
    window: Optional[WindowIn] = None


class AnalyzeRequest(BaseModel):
    panel: PanelIn
    window: Optional[WindowIn] = None
    linkage: list[Literal["single", "average"]] = ["single", "average"]
    replicas: int = Field(default=1600, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    cut: Optional[float] = Field(default=None, ge=0)


class MatrixOut(BaseModel):
    symbols: list[str]
    rows: list[list[float]]

    @classmethod
    def from_matrix(cls, matrix: LabelledMatrix) -> "MatrixOut":
        return cls(**matrix.to_json_obj())


class EdgeOut(BaseModel):
    a: str
    b: str
    weight: float
    boot: Optional[float] = None


class TreeOut(BaseModel):
    symbols: list[str]
    edges: list[EdgeOut]
    total_weight: float

    @classmethod
    def from_tree(cls, tree: SpanningTree) -> "TreeOut":
        obj = tree.to_json_obj()
        total = round(sum(e.weight for e in tree.edges), 6)
        return cls(symbols=obj["symbols"], edges=obj["edges"], total_weight=total)


class MergeOut(BaseModel):
    left: int
    right: int
    height: float


class DendrogramOut(BaseModel):
    method: str
    symbols: list[str]
    merges: list[MergeOut]
    newick: str

    @classmethod
    def from_dendrogram(cls, dendrogram: Dendrogram, newick: str) -> "DendrogramOut":
        return cls(**dendrogram.to_json_obj(), newick=newick)


class PartitionOut(BaseModel):
    method: str
    height: float
    groups: list[list[str]]


class LinkOut(BaseModel):
    a: str
    b: str
    reliability: float


class BootstrapOut(BaseModel):
    replicas: int
    seed: int
    rng: str
    degenerate: int
    links: list[LinkOut]

    @classmethod
    def from_report(cls, report: BootstrapReport) -> "BootstrapOut":
        return cls(**report.to_json_obj())


class MetricResponse(BaseModel):
    correlation: MatrixOut
    distance: MatrixOut


class TreeResponse(BaseModel):
    mst: TreeOut
    ultrametric: MatrixOut


class AnalyzeResponse(BaseModel):
    window: Optional[WindowIn] = None
    entities: int
    periods: int
    correlation: MatrixOut
    distance: MatrixOut
    mst: TreeOut
    dendrograms: list[DendrogramOut]
    partitions: list[PartitionOut]
    bootstrap: BootstrapOut


class VersionResponse(BaseModel):
    name: str
    version: str
    rng: str


class HealthResponse(BaseModel):
    status: str
