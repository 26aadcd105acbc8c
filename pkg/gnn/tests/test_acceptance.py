"""Secondary acceptance: structure-signal regression analogs.

Run with ``pytest -s tests/test_acceptance.py`` to see one
``ACCEPTANCE <name>: PASS/FAIL`` line per criterion.
"""

import math
from contextlib import contextmanager
from time import perf_counter

import numpy as np
import pytest

from gnn_harness.graphdata import load_snapshot
from gnn_harness.training import (
    GnnConfig,
    ablate_fanouts,
    mean_baseline_mae,
    train_gnn,
)
from taskgen import degree_task


@contextmanager
def criterion(name, budget_seconds):
    start = perf_counter()
    ok = False
    try:
        yield
        elapsed = perf_counter() - start
        assert elapsed < budget_seconds, (
            f"{name}: {elapsed:.2f}s exceeds the {budget_seconds}s budget"
        )
        ok = True
    finally:
        elapsed = perf_counter() - start
        print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s)")


@pytest.fixture(scope="module")
def degree_graph(degree_snapshot):
    return load_snapshot(
        degree_snapshot["manifest"], degree_snapshot["split"],
        degree_snapshot["labels"], feature_mode="rni", feature_dim=64,
    )


def test_rq2_analog(degree_graph):
    """3-layer GCN/GAT with RNI beat 0.7x mean baseline; zero init is worse."""
    with criterion("rq2-analog", 300):
        baseline = mean_baseline_mae(degree_graph)
        rni_mae = {}
        for arch in ("gcn", "gat"):
            report = train_gnn(degree_graph, GnnConfig(
                arch=arch, feature_mode="rni", epochs=20, eval_every=2,
                seeds=(0, 1, 2), fanouts=(50, 50, 50),
            ))
            assert report.status == "ok"
            rni_mae[arch] = report.mae_mean
            assert report.mae_mean < 0.7 * baseline, (
                f"{arch} RNI {report.mae_mean:.4f} vs 0.7*baseline {0.7 * baseline:.4f}"
            )
        for arch in ("gcn", "gat"):
            zero = train_gnn(degree_graph, GnnConfig(
                arch=arch, feature_mode="zero", epochs=8, eval_every=2,
                seeds=(0, 1, 2), fanouts=(50, 50, 50),
            ))
            assert zero.mae_mean > rni_mae[arch], (
                f"{arch} zero {zero.mae_mean:.4f} not worse than RNI {rni_mae[arch]:.4f}"
            )


def test_fanout_ablation_analog(degree_graph):
    """3-hop/30-neighbor beats 1-hop/90-neighbor over 3 seeds."""
    with criterion("fanout-ablation", 300):
        three_hop = train_gnn(degree_graph, GnnConfig(
            arch="gat", layers=3, fanouts=(30, 30, 30), epochs=20,
            eval_every=2, seeds=(0, 1, 2),
        ))
        one_hop = train_gnn(degree_graph, GnnConfig(
            arch="gat", layers=3, fanouts=(90,), epochs=20,
            eval_every=2, seeds=(0, 1, 2),
        ))
        assert three_hop.status == one_hop.status == "ok"
        assert three_hop.mae_mean < one_hop.mae_mean, (
            f"3-hop/30 {three_hop.mae_mean:.4f} vs 1-hop/90 {one_hop.mae_mean:.4f}"
        )


def test_smoke_grid_all_finite(tmp_path):
    """{5,10,30} x {1,2,3} grid on a small fixture: 9 finite cells."""
    with criterion("ablation-grid-smoke", 120):
        manifest, split, labels, _ = degree_task(tmp_path / "task", n=400, dmax=12,
                                                 window=30, seed=3)
        graph = load_snapshot(manifest, split, labels,
                              feature_mode="rni", feature_dim=32)
        base = GnnConfig(arch="gcn", epochs=2, eval_every=1, seeds=(0,),
                         fanouts=(5,), layers=3)
        cells = ablate_fanouts(graph, "gcn", [5, 10, 30], [1, 2, 3], base)
        assert len(cells) == 9
        for cell in cells:
            assert cell.result.status == "ok"
            assert math.isfinite(cell.result.mae_mean)
