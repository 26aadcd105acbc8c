"""Structural snapshot statistics.

Mean degree is total degree (2|E|/|V|) and edge density is
2|E|/(|V|(|V|-1)); those are the only formula choices that reconcile
with the reference counts this module is checked against.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import InputError
from .degrees import DegreeTable


@dataclass
class StatsReport:
    n_nodes: int
    n_edges: int
    edge_density: float
    mean_degree: float
    isolated: int | None = None
    leaves: int | None = None
    min_degree: int | None = None
    max_degree: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    def table(self) -> str:
        rows = [
            ("|V|", f"{self.n_nodes:,}"),
            ("|E|", f"{self.n_edges:,}"),
            ("Isolated nodes (deg = 0)", _opt(self.isolated)),
            ("Leaves (deg = 1)", _opt(self.leaves)),
            ("Edge density", f"{self.edge_density:.2e}"),
            ("Min. degree", _opt(self.min_degree)),
            ("Max. degree", _opt(self.max_degree)),
            ("Mean degree", f"{self.mean_degree:.2f}"),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def _opt(value) -> str:
    return "-" if value is None else f"{value:,}"


def stats_from_counts(n_nodes: int, n_edges: int) -> StatsReport:
    """Density and mean degree from counts alone."""
    if n_nodes < 2:
        raise InputError("edge density is undefined for fewer than 2 nodes")
    return StatsReport(
        n_nodes=n_nodes,
        n_edges=n_edges,
        edge_density=2.0 * n_edges / (n_nodes * (n_nodes - 1)),
        mean_degree=2.0 * n_edges / n_nodes,
    )


def compute_stats(degrees: DegreeTable, n_edges: int, chunk: int = 1 << 22) -> StatsReport:
    """One pass over the degree table."""
    n = degrees.n
    report = stats_from_counts(n, n_edges)
    isolated = leaves = 0
    min_deg = None
    max_deg = 0
    for start in range(0, n, chunk):
        total = degrees.total(slice(start, min(start + chunk, n)))
        isolated += int((total == 0).sum())
        leaves += int((total == 1).sum())
        block_min = int(total.min())
        min_deg = block_min if min_deg is None else min(min_deg, block_min)
        max_deg = max(max_deg, int(total.max()))
    report.isolated = isolated
    report.leaves = leaves
    report.min_degree = min_deg if min_deg is not None else 0
    report.max_degree = max_deg
    return report
