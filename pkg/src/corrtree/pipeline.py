"""End-to-end runs: panel -> window -> metrics -> trees -> bootstrap -> files.

The CLI and the HTTP service both drive this module. A run computes
every requested window fully in memory first and only then writes files,
so a failing window never leaves partial output behind.
"""

from __future__ import annotations

import json
import re
from contextlib import suppress
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .bootstrap import RNG_ALGORITHM, BootstrapConfig, BootstrapReport, link_reliability
from .errors import DataValidationError
from .linkage import METHODS, ClusterPartition, Dendrogram, average_linkage, cut, single_linkage, to_newick
from .metric import CorrelationMatrix, DistanceMatrix, correlation_matrix, distance_matrix
from .panel import TimeSeriesPanel, load_panel, log_returns, slice_window
from .tree import SpanningTree

FORMATS = ("dot", "newick", "json", "tsv")

_LINKAGE_BUILDERS = {"single": single_linkage, "average": average_linkage}


@dataclass(frozen=True)
class Window:
    """Half of a run's identity: None/None means the full panel."""

    start: str | None = None
    end: str | None = None

    def __post_init__(self) -> None:
        if (self.start is None) != (self.end is None):
            raise DataValidationError("window needs both start and end, or neither")

    @property
    def name(self) -> str:
        if self.start is None:
            return "full"
        return f"{_safe(self.start)}_{_safe(self.end)}"


def _safe(label: str | None) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "-", label or "")


@dataclass(frozen=True)
class RunConfig:
    input_path: Path
    out_dir: Path
    windows: tuple[Window, ...] = (Window(),)
    linkage_methods: tuple[str, ...] = ("single", "average")
    replicas: int = 1600
    seed: int = 0
    formats: tuple[str, ...] = FORMATS
    cut_height: float | None = None
    delimiter: str = ","
    jobs: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_path", Path(self.input_path))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if not self.windows:
            object.__setattr__(self, "windows", (Window(),))
        if len(set(w.name for w in self.windows)) != len(self.windows):
            raise DataValidationError("duplicate windows in one run")
        for m in self.linkage_methods:
            if m not in METHODS:
                raise DataValidationError(f"unknown linkage method {m!r}")
        if not self.formats:
            raise DataValidationError("need at least one export format")
        for f in self.formats:
            if f not in FORMATS:
                raise DataValidationError(f"unknown export format {f!r}")


@dataclass(frozen=True)
class WindowAnalysis:
    """Everything computed for one window of the panel."""

    window: Window
    panel: TimeSeriesPanel
    correlation: CorrelationMatrix
    distance: DistanceMatrix
    mst: SpanningTree
    report: BootstrapReport
    dendrograms: dict[str, Dendrogram] = field(default_factory=dict)
    partitions: dict[str, ClusterPartition] = field(default_factory=dict)


def analyze_window(
    panel: TimeSeriesPanel,
    window: Window,
    *,
    linkage_methods: tuple[str, ...] = ("single", "average"),
    replicas: int = 1600,
    seed: int = 0,
    cut_height: float | None = None,
    jobs: int = 1,
) -> WindowAnalysis:
    """Run the full analysis for one window of an already-loaded panel."""
    if window.start is not None:
        panel = slice_window(panel, window.start, window.end)
    returns = log_returns(panel)
    corr = correlation_matrix(returns)
    dist = distance_matrix(corr)
    tree, report = link_reliability(returns, BootstrapConfig(replicas=replicas, seed=seed), jobs=jobs)

    dendrograms: dict[str, Dendrogram] = {}
    partitions: dict[str, ClusterPartition] = {}
    for method in linkage_methods:
        dendrogram = _LINKAGE_BUILDERS[method](dist)
        dendrograms[method] = dendrogram
        if cut_height is not None:
            partitions[method] = cut(dendrogram, cut_height)

    return WindowAnalysis(
        window=window,
        panel=panel,
        correlation=corr,
        distance=dist,
        mst=tree,
        report=report,
        dendrograms=dendrograms,
        partitions=partitions,
    )


def _manifest(config: RunConfig, analysis: WindowAnalysis) -> dict[str, Any]:
    window = analysis.window
    return {
        "version": __version__,
        "input": str(config.input_path),
        "window": None if window.start is None else {"start": window.start, "end": window.end},
        "panel": {
            "entities": analysis.panel.n_entities,
            "periods": analysis.panel.n_periods,
            "returns": analysis.panel.n_periods - 1,
        },
        "linkage": list(config.linkage_methods),
        "replicas": config.replicas,
        "seed": config.seed,
        "rng": RNG_ALGORITHM,
        "formats": list(config.formats),
        "cut": config.cut_height,
        "degenerate_replicas": analysis.report.degenerate_replicas,
    }


def render_window_files(config: RunConfig, analysis: WindowAnalysis) -> dict[str, str]:
    """File name -> file content for one analyzed window."""
    formats = config.formats
    files: dict[str, str] = {}
    if "tsv" in formats:
        files["correlation.tsv"] = analysis.correlation.to_text(delimiter="\t")
        files["distance.tsv"] = analysis.distance.to_text(delimiter="\t")
    if "dot" in formats:
        files["mst.dot"] = analysis.mst.to_dot()
    if "json" in formats:
        files["mst.json"] = analysis.mst.to_json()
        files["bootstrap.json"] = analysis.report.to_json(decimals=6)
    for method, dendrogram in analysis.dendrograms.items():
        if "newick" in formats:
            files[f"dendrogram_{method}.nwk"] = to_newick(dendrogram)
        if "json" in formats:
            files[f"dendrogram_{method}.json"] = dendrogram.to_json()
    if "json" in formats:
        for method, partition in analysis.partitions.items():
            files[f"clusters_{method}.json"] = partition.to_json()
    files["manifest.json"] = json.dumps(_manifest(config, analysis), indent=2) + "\n"
    return files


def run(config: RunConfig) -> list[Path]:
    """Execute a full run; returns the paths written.

    All windows are computed before any file is written, and a failure
    while writing removes everything written by this invocation.
    """
    panel = load_panel(config.input_path, delimiter=config.delimiter)

    rendered: list[tuple[Window, dict[str, str]]] = []
    for window in config.windows:
        analysis = analyze_window(
            panel,
            window,
            linkage_methods=config.linkage_methods,
            replicas=config.replicas,
            seed=config.seed,
            cut_height=config.cut_height,
            jobs=config.jobs,
        )
        rendered.append((window, render_window_files(config, analysis)))

    written: list[Path] = []
    created: list[Path] = []
    try:
        for window, files in rendered:
            directory = config.out_dir / window.name
            for candidate in (config.out_dir, directory):
                if not candidate.exists():
                    created.append(candidate)
            directory.mkdir(parents=True, exist_ok=True)
            for name, content in sorted(files.items()):
                path = directory / name
                path.write_text(content, encoding="utf-8")
                written.append(path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        for directory in reversed(created):
            with suppress(OSError):
                directory.rmdir()
        raise
    return written
