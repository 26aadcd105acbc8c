#!/usr/bin/env python3
"""Monthly snapshots: week-aligned timestamps and key-joined diffs."""

from datetime import date

import numpy as np

from credigraph.temporal import SnapshotView, assign_timestamp, snapshot_diff

for crawl_id, start in [("CC-MAIN-2024-42", "2024-10-03"),
                        ("CC-MAIN-2024-46", "2024-11-07"),
                        ("CC-MAIN-2024-51", "2024-12-05")]:
    stamp = assign_timestamp(crawl_id, date.fromisoformat(start))
    print(f"{crawl_id}: crawl started {start} -> snapshot timestamp {stamp} (Monday)")

# October and November share 6 domains; two of them gain out-degree
october = SnapshotView(
    keys=["com.a", "com.b", "com.c", "com.d", "com.e", "com.f", "com.gone"],
    out_degrees=np.array([3, 1, 4, 1, 5, 9, 2]),
)
november = SnapshotView(
    keys=["com.new1", "com.a", "com.b", "com.c", "com.d", "com.e", "com.f"],
    out_degrees=np.array([7, 4, 1, 4, 1, 6, 9]),
)
diff = snapshot_diff(october, november)
print(f"\noverlap {diff.overlap_nodes}, new {diff.new_nodes}, vanished {diff.vanished_nodes}")
print(f"fraction of overlapping domains with increased out-degree: "
      f"{diff.out_degree_increased_fraction:.2f}")
