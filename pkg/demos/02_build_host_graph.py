#!/usr/bin/env python3
"""Page links -> deduplicated domain graph, the external-memory way.

Links are aggregated into sorted batch files, then a k-way merge builds
the node dictionary and the binary edge list.  Every id in the edge list
indexes the dictionary; ids follow lexicographic key order.
"""

import tempfile
from pathlib import Path

from credigraph.graphbuild import build_batch_graph, merge_batches, read_edges
from credigraph.warc import PageLink

workdir = Path(tempfile.mkdtemp(prefix="credigraph-demo-"))

batches = [
    [  # batch 1: two pages of news.example.com linking out
        PageLink("https://news.example.com/a", "https://other.org/x"),
        PageLink("https://news.example.com/b", "https://other.org/y"),   # same domain pair
        PageLink("https://news.example.com/a", "https://news.example.com/b"),  # self-loop
    ],
    [  # batch 2: overlaps on other.org
        PageLink("https://other.org/x", "https://example.com/"),
        PageLink("https://blog.example.com/p", "https://example.com/"),  # subdomain is distinct
    ],
]

paths = []
for i, links in enumerate(batches):
    result = build_batch_graph(links, workdir / f"batch-{i}")
    paths.append(result.path)
    print(f"batch {i}: {result.n_domains} domains, {result.n_edges} edges, "
          f"{result.self_loops_dropped} self-loops dropped")

dictionary, n_edges = merge_batches(paths, workdir / "dictionary.txt", workdir / "edges.bin")
print(f"\nmerged: {len(dictionary)} nodes, {n_edges} edges")
print("dictionary (id -> reversed-host key):")
for i, key in enumerate(dictionary.id_to_key):
    print(f"  {i}  {key}")
print("edges:")
for src, dst in read_edges(workdir / "edges.bin"):
    print(f"  {dictionary.key_of(int(src))} -> {dictionary.key_of(int(dst))}")
