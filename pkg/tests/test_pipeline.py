import json
from pathlib import Path

import numpy as np
import pytest

from corrtree.errors import DataValidationError
from corrtree.panel import dump_panel
from corrtree.pipeline import RunConfig, Window, analyze_window, render_window_files, run

from conftest import random_levels_panel


@pytest.fixture()
def panel_csv(tmp_path: Path) -> Path:
    rng = np.random.default_rng(200)
    path = tmp_path / "panel.csv"
    path.write_text(dump_panel(random_levels_panel(rng, 3, 40)), encoding="utf-8")
    return path


def test_window_requires_both_ends():
    with pytest.raises(DataValidationError):
        Window(start="2000-Q1", end=None)


def test_window_names():
    assert Window().name == "full"
    assert Window("2000-Q1", "2004-Q4").name == "2000-Q1_2004-Q4"
    assert Window("a/b", "c d").name == "a-b_c-d"


def test_duplicate_windows_rejected(tmp_path):
    with pytest.raises(DataValidationError, match="duplicate"):
        RunConfig(
            input_path=tmp_path / "x.csv",
            out_dir=tmp_path,
            windows=(Window("a", "b"), Window("a", "b")),
        )


def test_render_respects_formats(panel_csv, tmp_path):
    config = RunConfig(
        input_path=panel_csv,
        out_dir=tmp_path,
        replicas=5,
        formats=("newick",),
        linkage_methods=("average",),
    )
    from corrtree.panel import load_panel

    analysis = analyze_window(load_panel(panel_csv), Window(), linkage_methods=("average",), replicas=5)
    files = render_window_files(config, analysis)
    assert set(files) == {"dendrogram_average.nwk", "manifest.json"}


def test_manifest_contents(panel_csv, tmp_path):
    out = tmp_path / "out"
    config = RunConfig(input_path=panel_csv, out_dir=out, replicas=7, seed=5)
    run(config)
    manifest = json.loads((out / "full" / "manifest.json").read_text())
    assert manifest["replicas"] == 7
    assert manifest["seed"] == 5
    assert manifest["input"] == str(panel_csv)
    assert "philox" in manifest["rng"]
    assert manifest["version"]
    assert manifest["degenerate_replicas"] == 0


def test_write_failure_cleans_up_everything(panel_csv, tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    # Block the second window's directory with a plain file; the first
    # window's files must be rolled back.
    blocker = out / "2005-Q1_2009-Q4"
    blocker.write_text("in the way", encoding="utf-8")
    config = RunConfig(
        input_path=panel_csv,
        out_dir=out,
        replicas=5,
        windows=(Window("2000-Q1", "2004-Q4"), Window("2005-Q1", "2009-Q4")),
    )
    with pytest.raises(FileExistsError):
        run(config)
    assert sorted(p.name for p in out.iterdir()) == [blocker.name]
    assert blocker.read_text(encoding="utf-8") == "in the way"
