"""Correlation-based taxonomies of time-series panels.

Turns a panel of positive levels (one column per entity) into log-return
correlations, the distance transform sqrt(2(1-C)), the minimal spanning
tree of that distance, single- and average-linkage dendrograms, and
bootstrap reliability fractions for every MST link.
"""

__version__ = "0.1.0"

from .bootstrap import (
    RNG_ALGORITHM,
    BootstrapConfig,
    BootstrapReport,
    link_reliability,
    replica_stream,
    resample_rows,
)
from .errors import DataValidationError
from .linkage import (
    ClusterPartition,
    Dendrogram,
    Merge,
    average_linkage,
    cophenetic_matrix,
    cut,
    single_linkage,
    to_newick,
)
from .metric import CorrelationMatrix, DistanceMatrix, correlation_matrix, distance_matrix
from .panel import ReturnPanel, TimeSeriesPanel, load_panel, log_returns, slice_window
from .pipeline import RunConfig, Window, WindowAnalysis, analyze_window, run
from .tree import Edge, SpanningTree, UltrametricMatrix, kruskal_mst, subdominant_ultrametric, tree_length

__all__ = [
    "__version__",
    "BootstrapConfig",
    "BootstrapReport",
    "ClusterPartition",
    "CorrelationMatrix",
    "DataValidationError",
    "Dendrogram",
    "DistanceMatrix",
    "Edge",
    "Merge",
    "ReturnPanel",
    "RNG_ALGORITHM",
    "RunConfig",
    "SpanningTree",
    "TimeSeriesPanel",
    "UltrametricMatrix",
    "Window",
    "WindowAnalysis",
    "analyze_window",
    "average_linkage",
    "cophenetic_matrix",
    "correlation_matrix",
    "cut",
    "distance_matrix",
    "kruskal_mst",
    "link_reliability",
    "load_panel",
    "log_returns",
    "replica_stream",
    "resample_rows",
    "run",
    "single_linkage",
    "slice_window",
    "subdominant_ultrametric",
    "to_newick",
    "tree_length",
]
