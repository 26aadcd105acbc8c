"""Layered neighbor sampling for minibatch message passing.

A batch of seed nodes is expanded hop by hop: a frontier node with at
most ``fanout`` in-neighbors keeps them all; above the fanout, exactly
``fanout`` draws are taken with replacement (the vectorized trade-off;
duplicate messages only reweight the aggregate).  Each hop yields a
bipartite block whose destination nodes are the leading prefix of its
source nodes, so self/residual terms line up by index.  Blocks come
back input-side first, matching layer application order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Block:
    src_nodes: np.ndarray   # global ids; src_nodes[:n_dst] == dst_nodes
    dst_nodes: np.ndarray   # global ids
    edge_src: np.ndarray    # local index into src_nodes, message source
    edge_dst: np.ndarray    # local index into dst_nodes, message target

    @property
    def n_src(self) -> int:
        return len(self.src_nodes)

    @property
    def n_dst(self) -> int:
        return len(self.dst_nodes)


def _ragged_ranges(lengths: np.ndarray) -> np.ndarray:
    """[0..l0), [0..l1), ... concatenated."""
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.zeros(len(lengths), dtype=np.int64)
    np.cumsum(lengths[:-1], out=starts[1:])
    return np.arange(total, dtype=np.int64) - np.repeat(starts, lengths)


def _sample_neighbors(indptr, indices, nodes, fanout, rng):
    """(edge_dst_local, edge_src_global) with at most fanout draws per node."""
    deg = (indptr[nodes + 1] - indptr[nodes]).astype(np.int64)
    small = np.flatnonzero(deg <= fanout)
    big = np.flatnonzero(deg > fanout)

    parts_dst, parts_src = [], []
    small_deg = deg[small]
    keep = small_deg > 0
    small, small_deg = small[keep], small_deg[keep]
    if len(small):
        offsets = np.repeat(indptr[nodes[small]], small_deg) + _ragged_ranges(small_deg)
        parts_dst.append(np.repeat(small, small_deg))
        parts_src.append(indices[offsets])
    if len(big):
        draws = rng.integers(0, deg[big][:, None], size=(len(big), fanout))
        offsets = (indptr[nodes[big]][:, None] + draws).ravel()
        parts_dst.append(np.repeat(big, fanout))
        parts_src.append(indices[offsets])
    if not parts_dst:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return (
        np.concatenate(parts_dst),
        np.concatenate(parts_src).astype(np.int64),
    )


def sample_blocks(
    indptr: np.ndarray,
    indices: np.ndarray,
    n_nodes: int,
    seeds: np.ndarray,
    fanouts: list[int],
    rng: np.random.Generator,
) -> list[Block]:
    """Expand seeds through len(fanouts) hops; blocks input-side first."""
    blocks: list[Block] = []
    frontier = np.asarray(seeds, dtype=np.int64)
    lookup = np.full(n_nodes, -1, dtype=np.int64)
    for fanout in fanouts:  # output side inward
        edge_dst, src_global = _sample_neighbors(indptr, indices, frontier, fanout, rng)
        lookup[frontier] = np.arange(len(frontier))
        edge_src = lookup[src_global]
        missing = edge_src < 0
        extras = np.unique(src_global[missing])
        lookup[extras] = len(frontier) + np.arange(len(extras))
        edge_src[missing] = lookup[src_global[missing]]
        src_nodes = np.concatenate([frontier, extras])
        lookup[src_nodes] = -1
        blocks.append(Block(
            src_nodes=src_nodes, dst_nodes=frontier,
            edge_src=edge_src, edge_dst=edge_dst,
        ))
        frontier = src_nodes
    blocks.reverse()
    return blocks


def full_block(indptr: np.ndarray, indices: np.ndarray, n: int) -> Block:
    """The whole graph as one block (layer-wise full inference)."""
    all_nodes = np.arange(n, dtype=np.int64)
    edge_dst = np.repeat(all_nodes, np.diff(indptr))
    return Block(
        src_nodes=all_nodes, dst_nodes=all_nodes,
        edge_src=indices.astype(np.int64), edge_dst=edge_dst,
    )
