"""GNN architectures over sampled blocks: GCN, GraphSAGE, GAT, GATv2.

Layers operate on bipartite blocks (sources with features, destinations
being the leading prefix of the sources), aggregate with scatter-adds,
and optionally add a residual projection of the destination features.
A linear head maps the last hidden state to one regression output.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .sampling import Block, full_block

ARCHS = ("gcn", "sage", "gat", "gatv2")
_NEG_SLOPE = 0.2


def _scatter_sum(values: torch.Tensor, index: torch.Tensor, n_out: int) -> torch.Tensor:
    out = torch.zeros(n_out, values.shape[1], dtype=values.dtype)
    out.index_add_(0, index, values)
    return out


def _softmax_per_dst(scores: torch.Tensor, index: torch.Tensor, n_out: int) -> torch.Tensor:
    """Numerically stable softmax of edge scores grouped by destination."""
    maxes = torch.full((n_out,), -torch.inf, dtype=scores.dtype)
    maxes.scatter_reduce_(0, index, scores, reduce="amax", include_self=True)
    exp = torch.exp(scores - maxes[index])
    denom = torch.zeros(n_out, dtype=scores.dtype)
    denom.index_add_(0, index, exp)
    return exp / denom[index].clamp_min(1e-12)


class GcnLayer(nn.Module):
    """Symmetric-normalized convolution with self-loops.

    Normalization uses precomputed full-graph degrees (``node_norm``),
    so minibatch blocks and full-graph inference agree exactly whenever
    the fanout covers a node's in-neighborhood.
    """

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.lin = nn.Linear(in_dim, out_dim)

    def forward(self, block: Block, x_src: torch.Tensor,
                norm_src: torch.Tensor, norm_dst: torch.Tensor) -> torch.Tensor:
        row = torch.from_numpy(block.edge_dst)
        col = torch.from_numpy(block.edge_src)
        coef = (norm_src[col] * norm_dst[row]).unsqueeze(1)
        agg = _scatter_sum(x_src[col] * coef, row, block.n_dst)
        agg = agg + x_src[: block.n_dst] * (norm_dst * norm_dst).unsqueeze(1)
        return self.lin(agg)


class SageLayer(nn.Module):
    """Mean aggregation over sampled neighbors plus a self transform."""

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.lin_self = nn.Linear(in_dim, out_dim)
        self.lin_nbr = nn.Linear(in_dim, out_dim, bias=False)

    def forward(self, block: Block, x_src: torch.Tensor,
                norm_src: torch.Tensor, norm_dst: torch.Tensor) -> torch.Tensor:
        n_dst = block.n_dst
        row = torch.from_numpy(block.edge_dst)
        col = torch.from_numpy(block.edge_src)
        counts = torch.bincount(row, minlength=n_dst).clamp_min(1).float()
        mean = _scatter_sum(x_src[col], row, n_dst) / counts.unsqueeze(1)
        return self.lin_self(x_src[:n_dst]) + self.lin_nbr(mean)


class GatLayer(nn.Module):
    """Single-head attention, self-edge included in the softmax."""

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.lin = nn.Linear(in_dim, out_dim, bias=False)
        self.att_dst = nn.Parameter(torch.empty(out_dim))
        self.att_src = nn.Parameter(torch.empty(out_dim))
        self.bias = nn.Parameter(torch.zeros(out_dim))
        bound = 1.0 / np.sqrt(out_dim)
        nn.init.uniform_(self.att_dst, -bound, bound)
        nn.init.uniform_(self.att_src, -bound, bound)

    def forward(self, block: Block, x_src: torch.Tensor,
                norm_src: torch.Tensor, norm_dst: torch.Tensor) -> torch.Tensor:
        n_dst = block.n_dst
        self_idx = torch.arange(n_dst)
        row = torch.cat([torch.from_numpy(block.edge_dst), self_idx])
        col = torch.cat([torch.from_numpy(block.edge_src), self_idx])
        h = self.lin(x_src)
        scores = torch.nn.functional.leaky_relu(
            (h[:n_dst] * self.att_dst).sum(1)[row] + (h * self.att_src).sum(1)[col],
            negative_slope=_NEG_SLOPE,
        )
        alpha = _softmax_per_dst(scores, row, n_dst)
        return _scatter_sum(h[col] * alpha.unsqueeze(1), row, n_dst) + self.bias


class Gatv2Layer(nn.Module):
    """Dynamic attention: the score vector applies after the nonlinearity."""

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.lin_dst = nn.Linear(in_dim, out_dim, bias=False)
        self.lin_src = nn.Linear(in_dim, out_dim, bias=False)
        self.att = nn.Parameter(torch.empty(out_dim))
        self.bias = nn.Parameter(torch.zeros(out_dim))
        nn.init.uniform_(self.att, -1.0 / np.sqrt(out_dim), 1.0 / np.sqrt(out_dim))

    def forward(self, block: Block, x_src: torch.Tensor,
                norm_src: torch.Tensor, norm_dst: torch.Tensor) -> torch.Tensor:
        n_dst = block.n_dst
        self_idx = torch.arange(n_dst)
        row = torch.cat([torch.from_numpy(block.edge_dst), self_idx])
        col = torch.cat([torch.from_numpy(block.edge_src), self_idx])
        h_dst = self.lin_dst(x_src[:n_dst])
        h_src = self.lin_src(x_src)
        scores = (
            torch.nn.functional.leaky_relu(
                h_dst[row] + h_src[col], negative_slope=_NEG_SLOPE
            ) * self.att
        ).sum(1)
        alpha = _softmax_per_dst(scores, row, n_dst)
        return _scatter_sum(h_src[col] * alpha.unsqueeze(1), row, n_dst) + self.bias


_LAYERS = {"gcn": GcnLayer, "sage": SageLayer, "gat": GatLayer, "gatv2": Gatv2Layer}


class GnnRegressor(nn.Module):
    """Stacked convolutions with optional residuals and a scalar head."""

    def __init__(self, arch: str, in_dim: int, hidden_dim: int, n_layers: int,
                 dropout: float = 0.1, residual: bool = True):
        super().__init__()
        if arch not in _LAYERS:
            raise ValueError(f"unknown arch {arch!r}; expected one of {ARCHS}")
        layer_cls = _LAYERS[arch]
        dims = [in_dim] + [hidden_dim] * n_layers
        self.convs = nn.ModuleList(
            layer_cls(dims[i], dims[i + 1]) for i in range(n_layers)
        )
        self.residual = residual
        if residual:
            self.projs = nn.ModuleList(
                nn.Identity() if dims[i] == dims[i + 1]
                else nn.Linear(dims[i], dims[i + 1], bias=False)
                for i in range(n_layers)
            )
        self.dropout = nn.Dropout(dropout)
        self.head = nn.Linear(hidden_dim, 1)

    def _apply_layer(self, i: int, block: Block, h: torch.Tensor,
                     node_norm: torch.Tensor) -> torch.Tensor:
        norm_src = node_norm[torch.from_numpy(block.src_nodes)]
        norm_dst = norm_src[: block.n_dst]
        out = self.convs[i](block, h, norm_src, norm_dst)
        if self.residual:
            out = out + self.projs[i](h[: block.n_dst])
        return self.dropout(torch.relu(out))

    def forward_blocks(self, blocks: list[Block], x: torch.Tensor,
                       node_norm: torch.Tensor) -> torch.Tensor:
        """Minibatch path: x holds features of blocks[0].src_nodes."""
        h = x
        for i, block in enumerate(blocks):
            h = self._apply_layer(i, block, h, node_norm)
        return self.head(h).squeeze(-1)

    def forward_full(self, indptr: np.ndarray, indices: np.ndarray,
                     features: torch.Tensor, node_norm: torch.Tensor) -> torch.Tensor:
        """Layer-wise inference over the whole graph (deterministic)."""
        block = full_block(indptr, indices, len(features))
        h = features
        for i in range(len(self.convs)):
            h = self._apply_layer(i, block, h, node_norm)
        return self.head(h).squeeze(-1)
