from datetime import date

import numpy as np
import pytest

from credigraph import InputError
from credigraph.temporal import (
    SnapshotManifest,
    SnapshotView,
    assign_timestamp,
    build_temporal_graph,
    snapshot_diff,
)


def test_timestamp_thursday_maps_to_monday():
    assert assign_timestamp("CC-MAIN-2024-51", date(2024, 12, 5)) == date(2024, 12, 2)


def test_timestamp_monday_fixed_point():
    assert assign_timestamp("x", date(2024, 12, 2)) == date(2024, 12, 2)


def test_timestamp_calendar_oracle():
    # known Mondays from a calendar table
    cases = {
        "2024-10-03": "2024-09-30",
        "2024-11-17": "2024-11-11",
        "2024-12-31": "2024-12-30",
        "2025-01-01": "2024-12-30",
    }
    for start, monday in cases.items():
        assert assign_timestamp("id", date.fromisoformat(start)).isoformat() == monday


def test_timestamp_string_and_error():
    assert assign_timestamp("id", "2024-12-05") == date(2024, 12, 2)
    with pytest.raises(InputError):
        assign_timestamp("id", "not-a-date")


def view(keys, out_degrees):
    return SnapshotView(keys=keys, out_degrees=np.asarray(out_degrees))


def test_diff_identical_snapshots():
    snap = view(["com.a", "com.b"], [2, 3])
    diff = snapshot_diff(snap, snap)
    assert diff.overlap_nodes == 2
    assert diff.new_nodes == diff.vanished_nodes == 0
    assert diff.out_degree_increased_fraction == 0.0


def test_diff_one_increase_of_four():
    prev = view(["com.a", "com.b", "com.c", "com.d"], [1, 1, 1, 1])
    nxt = view(["com.d", "com.c", "com.b", "com.a"], [1, 1, 1, 2])
    diff = snapshot_diff(prev, nxt)
    assert diff.overlap_nodes == 4
    assert diff.out_degree_increased_fraction == 0.25


def test_diff_empty_overlap_undefined():
    diff = snapshot_diff(view(["com.a"], [1]), view(["com.b"], [1]))
    assert diff.out_degree_increased_fraction is None
    assert diff.new_nodes == 1 and diff.vanished_nodes == 1


def test_diff_oracle_and_symmetry():
    rng = np.random.default_rng(5)
    shared = [f"com.s{i}" for i in range(300)]
    only_prev = [f"com.p{i}" for i in range(40)]
    only_next = [f"com.n{i}" for i in range(60)]
    prev_keys = shared + only_prev
    next_keys = only_next + shared  # different order and id assignment
    prev_deg = rng.integers(0, 10, len(prev_keys))
    next_deg = rng.integers(0, 10, len(next_keys))

    diff = snapshot_diff(view(prev_keys, prev_deg), view(next_keys, next_deg))
    prev_map = dict(zip(prev_keys, prev_deg))
    next_map = dict(zip(next_keys, next_deg))
    increases = sum(1 for k in shared if next_map[k] > prev_map[k])
    assert diff.overlap_nodes == 300
    assert diff.new_nodes == 60
    assert diff.vanished_nodes == 40
    assert diff.out_degree_increased_fraction == pytest.approx(increases / 300)

    # swapped arguments: new/vanished swap; fraction counts decreases
    back = snapshot_diff(view(next_keys, next_deg), view(prev_keys, prev_deg))
    decreases = sum(1 for k in shared if prev_map[k] > next_map[k])
    assert back.new_nodes == 40 and back.vanished_nodes == 60
    assert back.out_degree_increased_fraction == pytest.approx(decreases / 300)


def test_diff_id_assignment_invariance():
    keys = [f"com.k{i}" for i in range(50)]
    deg = list(range(50))
    base = snapshot_diff(view(keys, deg), view(keys, [d + (i % 2) for i, d in enumerate(deg)]))
    perm = np.random.default_rng(1).permutation(50)
    shuffled = view([keys[i] for i in perm], [deg[i] + (int(i) % 2) for i in perm])
    again = snapshot_diff(view(keys, deg), shuffled)
    assert again == base


def manifest(tmp_path, sid, stamp):
    m = SnapshotManifest(snapshot_id=sid, timestamp=stamp)
    path = tmp_path / f"{sid}.json"
    m.save(path)
    return path


def test_temporal_singleton(tmp_path):
    out = build_temporal_graph([manifest(tmp_path, "M0", "2024-10-07")])
    assert len(out) == 1


def test_temporal_sorting(tmp_path):
    paths = [
        manifest(tmp_path, "M1", "2024-11-04"),
        manifest(tmp_path, "M0", "2024-10-07"),
    ]
    out = build_temporal_graph(paths, tmp_path / "temporal.json")
    assert [m.snapshot_id for m in out] == ["M0", "M1"]
    assert (tmp_path / "temporal.json").exists()


def test_temporal_three_months(tmp_path):
    paths = [
        manifest(tmp_path, "M0", "2024-10-07"),
        manifest(tmp_path, "M1", "2024-11-04"),
        manifest(tmp_path, "M2", "2024-12-02"),
    ]
    out = build_temporal_graph(paths)
    assert len(out) - 1 == 2  # T = 2
    assert [m.timestamp for m in out] == ["2024-10-07", "2024-11-04", "2024-12-02"]


def test_temporal_duplicate_id(tmp_path):
    paths = [manifest(tmp_path, "M0", "2024-10-07")]
    dup = SnapshotManifest(snapshot_id="M0", timestamp="2024-11-04")
    dup_path = tmp_path / "dup.json"
    dup.save(dup_path)
    with pytest.raises(InputError):
        build_temporal_graph(paths + [dup_path])


def test_temporal_equal_timestamps(tmp_path):
    paths = [
        manifest(tmp_path, "M0", "2024-10-07"),
        manifest(tmp_path, "M1", "2024-10-07"),
    ]
    with pytest.raises(InputError):
        build_temporal_graph(paths)
