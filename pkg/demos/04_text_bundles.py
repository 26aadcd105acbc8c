#!/usr/bin/env python3
"""Per-domain text bundles: group, sample three longest + three shortest.

Also shows the stub homepage fetcher filling in a domain that had no
archived text at all.
"""

import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

from credigraph.textstore import (
    StubFetcher,
    fetch_missing,
    group_documents,
    iter_groups,
    sample_representative,
)
from credigraph.warc import WetDocument

base = datetime(2024, 12, 2, tzinfo=timezone.utc)
workdir = Path(tempfile.mkdtemp(prefix="credigraph-demo-"))

docs = []
for i, length in enumerate([5, 40, 12, 90, 3, 77, 64, 21]):  # 8 docs for one domain
    docs.append(WetDocument(
        url=f"https://news.example.com/p{i}",
        fetch_time=base + timedelta(hours=i),
        languages=["eng"],
        text=f"doc{i} " + "lorem " * length,
    ))
docs.append(WetDocument(url="https://other.org/solo", fetch_time=base,
                        languages=[], text="a single document"))

index = group_documents(docs, workdir / "grouped.jsonl")
print(f"grouped {index.n_documents} documents into {index.n_domains} domains\n")

for key, group in iter_groups(index.path):
    bundle = sample_representative(key, group)
    lengths = [len(d["text"]) for d in bundle.documents_kept]
    print(f"{key}: saw {bundle.total_documents_seen}, kept {len(bundle.documents_kept)} "
          f"with lengths {lengths}")
    print(f"  merged_text starts: {bundle.merged_text[:72]!r}\n")

outcome = fetch_missing(
    ["com.textless", "com.gone"],
    StubFetcher({"com.textless": "Welcome to our homepage."}),
    fetch_time=base.isoformat(),
)
print(f"homepage fetch: {len(outcome.bundles)} filled, misses {outcome.misses}")
