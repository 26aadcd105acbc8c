"""Training loops, multi-seed reports, and the fanout/hop ablation."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch

from . import HarnessError
from .graphdata import GraphData, make_features
from .models import GnnRegressor
from .sampling import sample_blocks

log = logging.getLogger(__name__)


@dataclass
class GnnConfig:
    arch: str = "gcn"                     # gcn | sage | gat | gatv2
    layers: int = 3
    hidden_dim: int = 64
    dropout: float = 0.1
    learning_rate: float = 0.001
    epochs: int = 100
    batch_size: int = 50
    fanouts: tuple = (50, 50, 50)
    feature_mode: str = "rni"
    feature_dim: int = 64
    seeds: tuple = (0, 1, 2)
    residual: bool = True
    loss: str = "mae"                     # mae | mse
    eval_every: int = 1

    def __post_init__(self):
        if len(self.fanouts) > self.layers:
            raise HarnessError(
                f"len(fanouts)={len(self.fanouts)} exceeds layers={self.layers}"
            )

    @property
    def depth(self) -> int:
        """Message-passing depth: one conv per sampled hop."""
        return len(self.fanouts)


def _loss_fn(name: str):
    if name == "mae":
        return torch.nn.functional.l1_loss
    if name == "mse":
        return torch.nn.functional.mse_loss
    raise HarnessError(f"unknown loss {name!r}")


def _mae(preds: torch.Tensor, targets: torch.Tensor) -> float:
    return float((preds.clamp(0, 1) - targets).abs().mean())


def mean_baseline_mae(graph: GraphData) -> float:
    """Train-label mean predictor evaluated on the test split."""
    mean = float(graph.labels[graph.train_ids].mean())
    clamped = min(max(mean, 0.0), 1.0)
    return float(np.abs(clamped - graph.labels[graph.test_ids]).mean())


def train_single(
    graph: GraphData,
    config: GnnConfig,
    seed: int,
    features: np.ndarray | None = None,
) -> dict:
    """One seeded run: neighbor-sampled minibatches, best-val checkpoint."""
    torch.manual_seed(seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    if features is None:
        features = graph.features
    feats = torch.from_numpy(np.ascontiguousarray(features, dtype=np.float32))
    labels = torch.from_numpy(graph.labels)
    node_norm = torch.from_numpy(graph.gcn_norm)

    model = GnnRegressor(
        config.arch, feats.shape[1], config.hidden_dim, config.depth,
        dropout=config.dropout, residual=config.residual,
    )
    with torch.no_grad():  # head starts at the mean predictor
        model.head.bias.fill_(float(graph.labels[graph.train_ids].mean()))
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = _loss_fn(config.loss)

    val_targets = labels[graph.val_ids]
    test_targets = labels[graph.test_ids]
    best_val = float("inf")
    best_state = {k: v.clone() for k, v in model.state_dict().items()}

    train_ids = graph.train_ids.copy()
    for epoch in range(config.epochs):
        model.train()
        rng.shuffle(train_ids)
        for start in range(0, len(train_ids), config.batch_size):
            seeds = train_ids[start:start + config.batch_size]
            blocks = sample_blocks(
                graph.indptr, graph.indices, graph.n, seeds,
                list(config.fanouts), rng,
            )
            x = feats[torch.from_numpy(blocks[0].src_nodes)]
            preds = model.forward_blocks(blocks, x, node_norm)
            loss = loss_fn(preds, labels[torch.from_numpy(seeds)])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

        if (epoch + 1) % config.eval_every == 0 or epoch == config.epochs - 1:
            model.eval()
            with torch.no_grad():
                out = model.forward_full(graph.indptr, graph.indices, feats, node_norm)
            val_mae = _mae(out[torch.from_numpy(graph.val_ids)], val_targets)
            if val_mae < best_val:
                best_val = val_mae
                best_state = {k: v.clone() for k, v in model.state_dict().items()}

    model.load_state_dict(best_state)
    model.eval()
    with torch.no_grad():
        out = model.forward_full(graph.indptr, graph.indices, feats, node_norm)
    return {
        "seed": seed,
        "test_mae": _mae(out[torch.from_numpy(graph.test_ids)], test_targets),
        "val_mae": best_val,
    }


@dataclass
class GnnReport:
    arch: str
    feature_mode: str
    target: str
    status: str = "ok"                      # ok | OOM
    mae_mean: float | None = None
    mae_std: float | None = None
    val_mean: float | None = None
    baseline_mae: float | None = None
    per_seed: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def cell(self) -> str:
        """Table-cell rendering: 'mean ± std' or 'OOM'."""
        if self.status != "ok":
            return self.status
        return f"{self.mae_mean:.3f} ± {self.mae_std:.3f}"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def _is_oom(exc: BaseException) -> bool:
    if isinstance(exc, (MemoryError, torch.cuda.OutOfMemoryError)):
        return True
    return isinstance(exc, RuntimeError) and "out of memory" in str(exc).lower()


def train_gnn(graph: GraphData, config: GnnConfig) -> GnnReport:
    """Mean ± std of test MAE over the configured seeds.

    RNI features are redrawn per seed; an out-of-memory failure is
    reported as an OOM result, never raised.
    """
    report = GnnReport(
        arch=config.arch, feature_mode=config.feature_mode, target=graph.target,
        baseline_mae=mean_baseline_mae(graph),
        config={**asdict(config), "fanouts": list(config.fanouts),
                "seeds": list(config.seeds)},
    )
    try:
        for seed in config.seeds:
            if config.feature_mode == "rni":
                features = make_features("rni", graph.n, config.feature_dim, seed=seed)
            elif config.feature_mode == "zero":
                features = make_features("zero", graph.n, config.feature_dim)
            else:
                features = graph.features
            report.per_seed.append(train_single(graph, config, seed, features=features))
    except Exception as exc:
        if not _is_oom(exc):
            raise
        report.status = "OOM"
        log.warning("%s fanouts=%s: out of memory", config.arch, config.fanouts)
        return report
    maes = [run["test_mae"] for run in report.per_seed]
    report.mae_mean = float(np.mean(maes))
    report.mae_std = float(np.std(maes))
    report.val_mean = float(np.mean([run["val_mae"] for run in report.per_seed]))
    return report


@dataclass
class AblationCell:
    neighbors: int
    hops: int
    result: GnnReport


def ablate_fanouts(
    graph: GraphData,
    arch: str,
    neighbors_grid: list[int],
    hops_grid: list[int],
    base_config: GnnConfig | None = None,
    train=train_gnn,
) -> list[AblationCell]:
    """One run per {neighbors x hops} cell; OOM cells become table entries."""
    base = base_config or GnnConfig(arch=arch)
    cells = []
    for neighbors in neighbors_grid:
        for hops in hops_grid:
            config = GnnConfig(**{
                **asdict(base),
                "arch": arch,
                "layers": max(base.layers, hops),
                "fanouts": tuple([neighbors] * hops),
                "seeds": tuple(base.seeds),
            })
            try:
                result = train(graph, config)
            except Exception as exc:
                if not _is_oom(exc):
                    raise
                result = GnnReport(arch=arch, feature_mode=base.feature_mode,
                                   target=graph.target, status="OOM")
            cells.append(AblationCell(neighbors=neighbors, hops=hops, result=result))
    return cells


def write_results_csv(reports: list[GnnReport], path: str | Path) -> None:
    """Method-by-MAE table shaped like the comparison tables."""
    with Path(path).open("w", newline="\n") as out:
        out.write("method,feature_mode,target,mae_mean,mae_std,baseline_mae,status\n")
        for report in reports:
            mean = "" if report.mae_mean is None else f"{report.mae_mean:.4f}"
            std = "" if report.mae_std is None else f"{report.mae_std:.4f}"
            base = "" if report.baseline_mae is None else f"{report.baseline_mae:.4f}"
            out.write(f"{report.arch},{report.feature_mode},{report.target},"
                      f"{mean},{std},{base},{report.status}\n")


def write_ablation_csv(cells: list[AblationCell], path: str | Path) -> None:
    """Neighbors x hops grid with 'mean ± std' or OOM cells."""
    hops = sorted({cell.hops for cell in cells})
    neighbors = sorted({cell.neighbors for cell in cells})
    by_key = {(c.neighbors, c.hops): c.result for c in cells}
    with Path(path).open("w", newline="\n") as out:
        out.write("num_neighbors," + ",".join(f"{h}-hop" for h in hops) + "\n")
        for nbr in neighbors:
            row = [str(nbr)]
            for hop in hops:
                result = by_key.get((nbr, hop))
                row.append(result.cell() if result else "N/A")
            out.write(",".join(row) + "\n")
