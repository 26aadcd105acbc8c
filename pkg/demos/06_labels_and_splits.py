#!/usr/bin/env python3
"""Credibility ratings: loading, joining onto a graph, stratified splits."""

import tempfile
from pathlib import Path

from credigraph.graphbuild import NodeDictionary
from credigraph.labels import join_labels, load_dqr, stratified_split

workdir = Path(tempfile.mkdtemp(prefix="credigraph-demo-"))

ratings = workdir / "ratings.csv"
ratings.write_text(
    "domain,pc1,mbfc,notes\n"
    "ncdc.noaa.gov,0.90,0.84,government climate data\n"
    "ctvnews.ca,0.92,0.91,\n"
    "nbcsports.com,0.76,0.79,\n"
    "foxnews.com,0.53,0.58,\n"
    "climate.news,0.07,0.11,\n"
    "naturalnews.com,0.00,0.11,\n"
    "dupe.example,0.20,0.20,first row\n"
    "dupe.example,0.25,0.25,last row wins\n"
    "bad.example,1.30,0.50,rejected: out of range\n"
)
labels, report = load_dqr(ratings)
print(f"loaded {report.labels} labels "
      f"({report.rejected_range} out-of-range, {report.duplicates} duplicates)")
for label in labels:
    print(f"  {label.node:<22} pc1={label.pc1}  mbfc={label.mbfc}")

dictionary = NodeDictionary.from_keys(
    ["gov.noaa.ncdc", "ca.ctvnews", "com.foxnews", "news.climate", "com.unrelated"]
)
joined, join_rep = join_labels(dictionary, labels)
print(f"\njoined {join_rep.matched} labels onto a {len(dictionary)}-node graph; "
      f"unmatched: {join_rep.unmatched}")

# a bigger synthetic label set to show the stratified cut
big = [type(labels[0])(f"com.site{i:04d}", (i % 100) / 100 + 0.005, None) for i in range(1000)]
split = stratified_split(big, "pc1", seed=42)
print(f"\nstratified split of {len(big)}: "
      f"train {len(split.train)} / val {len(split.val)} / test {len(split.test)}")
again = stratified_split(big, "pc1", seed=42)
print("same seed reproduces the split exactly:", split == again)
