import random
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credigraph.textstore import (
    StubFetcher,
    fetch_missing,
    group_documents,
    iter_bundles,
    iter_groups,
    sample_representative,
    write_bundles,
)
from credigraph.warc import WetDocument

BASE = datetime(2024, 12, 2, tzinfo=timezone.utc)


def make_doc(url, text, minute=0):
    return WetDocument(
        url=url, fetch_time=BASE + timedelta(minutes=minute), languages=[], text=text
    )


def make_group(lengths, key="com.a"):
    host = ".".join(reversed(key.split(".")))
    return [
        {
            "key": key,
            "url": f"https://{host}/p{i}",
            "fetch_time": (BASE + timedelta(minutes=i)).isoformat(),
            "text": "x" * length,
        }
        for i, length in enumerate(lengths)
    ]


# ------------------------------------------------------------------ grouping

def test_group_two_domains(tmp_path):
    docs = [
        make_doc("https://a.com/1", "one"),
        make_doc("https://a.com/2", "two"),
        make_doc("https://a.com/3", "three"),
        make_doc("https://b.com/1", "four"),
    ]
    index = group_documents(docs, tmp_path / "grouped.jsonl")
    groups = dict(iter_groups(index.path))
    assert {k: len(v) for k, v in groups.items()} == {"com.a": 3, "com.b": 1}
    assert index.n_domains == 2
    assert index.skipped == 0


def test_group_skips_ip_urls(tmp_path):
    docs = [make_doc("http://127.0.0.1/x", "nope"), make_doc("https://a.com/1", "ok")]
    index = group_documents(docs, tmp_path / "grouped.jsonl")
    assert index.skipped == 1
    assert index.n_documents == 1


def test_group_counting_oracle(tmp_path):
    rng = random.Random(4)
    domains = [f"d{i}.com" for i in range(200)]
    expected = {}
    docs = []
    for i in range(10_000):
        host = rng.choice(domains)
        key = "com." + host.split(".")[0]
        expected[key] = expected.get(key, 0) + 1
        docs.append(make_doc(f"https://{host}/p{i}", f"text {i}", minute=i % 60))
    index = group_documents(docs, tmp_path / "grouped.jsonl", run_size=777)
    sizes = {k: len(v) for k, v in iter_groups(index.path)}
    assert sizes == expected


# ------------------------------------------------------------------ sampling

def test_three_longest_three_shortest():
    group = make_group(range(1, 11))
    bundle = sample_representative("com.a", group)
    kept = [len(d["text"]) for d in bundle.documents_kept]
    assert kept == [10, 9, 8, 1, 2, 3]
    assert bundle.total_documents_seen == 10


def test_small_group_kept_once():
    group = make_group([8, 5, 3, 1])
    bundle = sample_representative("com.a", group)
    assert len(bundle.documents_kept) == 4
    urls = [d["url"] for d in bundle.documents_kept]
    assert len(set(urls)) == 4
    assert [len(d["text"]) for d in bundle.documents_kept] == [8, 5, 3, 1]


def test_sort_oracle_large_group():
    rng = random.Random(6)
    group = make_group([rng.randrange(1, 5000) for _ in range(1000)])
    bundle = sample_representative("com.a", group)
    ordered = sorted(group, key=lambda d: (-len(d["text"]), d["url"]))
    expected = ordered[:3] + ordered[-3:][::-1]
    assert [d["url"] for d in bundle.documents_kept] == [d["url"] for d in expected]


def test_permutation_invariance():
    rng = random.Random(7)
    group = make_group([rng.randrange(1, 100) for _ in range(40)])
    bundle = sample_representative("com.a", group)
    for _ in range(5):
        rng.shuffle(group)
        again = sample_representative("com.a", group)
        assert again.documents_kept == bundle.documents_kept
        assert again.merged_text == bundle.merged_text


def test_merged_text_timestamps_once():
    group = make_group([10, 20, 30, 40, 50, 60, 70, 80])
    bundle = sample_representative("com.a", group)
    for doc in bundle.documents_kept:
        assert bundle.merged_text.count(doc["fetch_time"]) == 1


def test_truncation_limit():
    group = make_group([5000, 4000, 3000])
    bundle = sample_representative("com.a", group, limit=100)
    assert len(bundle.merged_text) == 100


@given(st.lists(st.integers(min_value=0, max_value=500), min_size=1, max_size=30))
@settings(max_examples=60, deadline=None)
def test_kept_set_property(lengths):
    group = make_group(lengths)
    bundle = sample_representative("com.a", group)
    k = len(lengths)
    assert len(bundle.documents_kept) == min(k, 6)
    urls = [d["url"] for d in bundle.documents_kept]
    assert len(set(urls)) == len(urls)
    kept_lengths = sorted(len(d["text"]) for d in bundle.documents_kept)
    all_sorted = sorted(lengths)
    if k > 6:
        assert kept_lengths[:3] == all_sorted[:3]
        assert kept_lengths[-3:] == all_sorted[-3:]


# ------------------------------------------------------------------- fetch

def test_stub_fetch_hit_and_miss():
    outcome = fetch_missing(["com.a", "com.b"], StubFetcher({"com.a": "hello"}),
                            fetch_time="2024-12-02T00:00:00+00:00")
    assert len(outcome.bundles) == 1
    assert outcome.bundles[0].node == "com.a"
    assert outcome.bundles[0].merged_text.endswith("hello")
    assert outcome.misses == ["com.b"]


def test_fetch_empty_list():
    outcome = fetch_missing([], StubFetcher({}))
    assert outcome.bundles == [] and outcome.misses == []


def test_fetch_fixture_counts():
    rng = random.Random(8)
    requested = [f"com.d{i}" for i in range(80)]
    have = {key: f"home of {key}" for key in rng.sample(requested, 50)}
    outcome = fetch_missing(requested, StubFetcher(have), fetch_time="t0")
    assert len(outcome.bundles) == 50
    assert len(outcome.misses) == 30
    assert len(outcome.bundles) + len(outcome.misses) == len(requested)


def test_fetch_exception_is_soft():
    class Exploding:
        max_in_flight = 2
        timeout = 1.0

        def fetch(self, node):
            if node == "com.bad":
                raise RuntimeError("boom")
            return "ok"

    outcome = fetch_missing(["com.bad", "com.good"], Exploding(), fetch_time="t0")
    assert outcome.failures == ["com.bad"]
    assert [b.node for b in outcome.bundles] == ["com.good"]


# ------------------------------------------------------------- bundle store

def test_bundle_store_roundtrip(tmp_path):
    bundles = [
        sample_representative("com.a", make_group([3, 1, 4, 1, 5])),
        sample_representative("com.b", make_group([2, 7], key="com.b")),
    ]
    path = tmp_path / "bundles.bin"
    assert write_bundles(path, bundles) == 2
    again = list(iter_bundles(path))
    assert [b.node for b in again] == ["com.a", "com.b"]
    assert again[0].merged_text == bundles[0].merged_text
    assert again[0].documents_kept == bundles[0].documents_kept
    assert again[1].total_documents_seen == 2
