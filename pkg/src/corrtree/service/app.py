"""HTTP service exposing the analysis pipeline.

Run locally with: uvicorn corrtree.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bootstrap import RNG_ALGORITHM
from ..errors import DataValidationError
from ..linkage import to_newick
from ..metric import correlation_matrix, distance_matrix
from ..panel import TimeSeriesPanel, log_returns, slice_window
from ..pipeline import Window, analyze_window
from ..tree import kruskal_mst, subdominant_ultrametric
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    BootstrapOut,
    DendrogramOut,
    HealthResponse,
    MatrixOut,
    MetricResponse,
    PanelIn,
    PanelRequest,
    PartitionOut,
    TreeOut,
    TreeResponse,
    VersionResponse,
    WindowIn,
)


def _to_panel(payload: PanelIn) -> TimeSeriesPanel:
    return TimeSeriesPanel(
        symbols=tuple(payload.symbols),
        time_labels=tuple(payload.time_labels),
        values=payload.values,
    )


def _windowed(payload: PanelIn, window: WindowIn | None) -> TimeSeriesPanel:
    panel = _to_panel(payload)
    if window is not None:
        panel = slice_window(panel, window.start, window.end)
    return panel


def create_app() -> FastAPI:
    app = FastAPI(title="corrtree", version=__version__)

    @app.exception_handler(DataValidationError)
    async def _data_error(_: Request, exc: DataValidationError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok")

    @app.get("/version", response_model=VersionResponse)
    def version() -> VersionResponse:
        return VersionResponse(name="corrtree", version=__version__, rng=RNG_ALGORITHM)

    @app.post("/metric", response_model=MetricResponse)
    def metric(request: PanelRequest) -> MetricResponse:
        panel = _windowed(request.panel, request.window)
        corr = correlation_matrix(log_returns(panel))
        return MetricResponse(
            correlation=MatrixOut.from_matrix(corr),
            distance=MatrixOut.from_matrix(distance_matrix(corr)),
        )

    @app.post("/mst", response_model=TreeResponse)
    def mst(request: PanelRequest) -> TreeResponse:
        panel = _windowed(request.panel, request.window)
        tree = kruskal_mst(distance_matrix(correlation_matrix(log_returns(panel))))
        return TreeResponse(
            mst=TreeOut.from_tree(tree),
            ultrametric=MatrixOut.from_matrix(subdominant_ultrametric(tree)),
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
        window = (
            Window()
            if request.window is None
            else Window(start=request.window.start, end=request.window.end)
        )
        analysis = analyze_window(
            _to_panel(request.panel),
            window,
            linkage_methods=tuple(request.linkage),
            replicas=request.replicas,
            seed=request.seed,
            cut_height=request.cut,
        )
        return AnalyzeResponse(
            window=request.window,
            entities=analysis.panel.n_entities,
            periods=analysis.panel.n_periods,
            correlation=MatrixOut.from_matrix(analysis.correlation),
            distance=MatrixOut.from_matrix(analysis.distance),
            mst=TreeOut.from_tree(analysis.mst),
            dendrograms=[
                DendrogramOut.from_dendrogram(d, to_newick(d).strip())
                for d in analysis.dendrograms.values()
            ],
            partitions=[
                PartitionOut(method=m, height=p.height, groups=[list(g) for g in p.groups])
                for m, p in analysis.partitions.items()
            ],
            bootstrap=BootstrapOut.from_report(analysis.report),
        )

    return app


app = create_app()
