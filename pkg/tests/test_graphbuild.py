import random

import numpy as np
import pytest

from credigraph import FormatError
from credigraph.graphbuild import (
    NodeDictionary,
    build_batch_graph,
    edge_count,
    iter_batch_domains,
    iter_batch_edges,
    merge_batches,
    read_edges,
)
from credigraph.hostnames import normalize_host
from credigraph.warc import PageLink


def brute_force(links):
    """In-memory aggregation oracle: node set + deduped domain edge set."""
    domains, edges = set(), set()
    for link in links:
        src, dst = normalize_host(link.source_url), normalize_host(link.target_url)
        if src is None or dst is None:
            continue
        domains.update((src, dst))
        if src != dst:
            edges.add((src, dst))
    return domains, edges


def random_links(rng, n_domains, n_links):
    hosts = [f"host{i}.d{rng.randrange(20)}.com" for i in range(n_domains)]
    return [
        PageLink(
            f"https://{rng.choice(hosts)}/p{rng.randrange(9)}",
            f"https://{rng.choice(hosts)}/q{rng.randrange(9)}",
        )
        for _ in range(n_links)
    ]


def test_batch_dedup_and_selfloop(tmp_path):
    links = [
        PageLink("https://a.com/p", "https://b.com/q"),
        PageLink("https://a.com/r", "https://b.com/s"),
        PageLink("https://a.com/p", "https://a.com/q"),
    ]
    result = build_batch_graph(links, tmp_path / "b0")
    assert sorted(iter_batch_domains(result.path)) == ["com.a", "com.b"]
    assert list(iter_batch_edges(result.path)) == [("com.a", "com.b")]
    assert result.self_loops_dropped == 1


def test_batch_oracle(tmp_path):
    rng = random.Random(11)
    links = random_links(rng, 50, 1000)
    result = build_batch_graph(links, tmp_path / "b0")
    domains, edges = brute_force(links)
    assert set(iter_batch_domains(result.path)) == domains
    assert set(iter_batch_edges(result.path)) == edges


def test_merge_union(tmp_path):
    p1 = tmp_path / "b1"
    p2 = tmp_path / "b2"
    build_batch_graph([PageLink("https://a.com/", "https://b.com/")], p1)
    build_batch_graph([PageLink("https://b.com/", "https://c.com/")], p2)
    dictionary, n_edges = merge_batches([p1, p2], tmp_path / "dict", tmp_path / "edges")
    assert len(dictionary) == 3
    assert n_edges == 2


def test_merge_single_batch_identity(tmp_path):
    links = random_links(random.Random(3), 20, 200)
    result = build_batch_graph(links, tmp_path / "b0")
    dictionary, n_edges = merge_batches(
        [result.path], tmp_path / "dict", tmp_path / "edges"
    )
    assert dictionary.id_to_key == sorted(iter_batch_domains(result.path))
    assert n_edges == result.n_edges


@pytest.mark.parametrize("seed", [1, 2])
def test_merge_oracle_and_determinism(tmp_path, seed):
    rng = random.Random(seed)
    all_links = []
    paths = []
    for b in range(10):
        links = random_links(rng, 40, rng.randint(100, 600))
        all_links.extend(links)
        paths.append(build_batch_graph(links, tmp_path / f"b{b}").path)

    dictionary, _ = merge_batches(paths, tmp_path / "dict", tmp_path / "edges")
    domains, edges = brute_force(all_links)
    assert set(dictionary.id_to_key) == domains
    got = {
        (dictionary.key_of(int(s)), dictionary.key_of(int(d)))
        for s, d in read_edges(tmp_path / "edges")
    }
    assert got == edges

    # batch order must not change outputs, byte for byte
    rng.shuffle(paths)
    merge_batches(paths, tmp_path / "dict2", tmp_path / "edges2")
    assert (tmp_path / "dict2").read_bytes() == (tmp_path / "dict").read_bytes()
    assert (tmp_path / "edges2").read_bytes() == (tmp_path / "edges").read_bytes()


def test_merged_invariants(tmp_path):
    links = random_links(random.Random(9), 30, 500)
    path = build_batch_graph(links, tmp_path / "b0").path
    dictionary, _ = merge_batches([path], tmp_path / "dict", tmp_path / "edges")
    pairs = read_edges(tmp_path / "edges")
    assert np.all(pairs[:, 0] != pairs[:, 1])
    assert len(np.unique(pairs, axis=0)) == len(pairs)
    assert pairs.max(initial=0) < len(dictionary)
    # sorted by (src, dst)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    assert np.array_equal(order, np.arange(len(pairs)))


def test_dictionary_bijection(tmp_path):
    dictionary = NodeDictionary.from_keys(["com.b", "com.a", "com.a.x"])
    assert [dictionary.id_of(dictionary.key_of(i)) for i in range(3)] == [0, 1, 2]
    dictionary.save(tmp_path / "dict")
    again = NodeDictionary.load(tmp_path / "dict")
    assert again.id_to_key == dictionary.id_to_key


def test_bad_version_header(tmp_path):
    bad = tmp_path / "bad"
    bad.write_text("NOTABATCH\nD 0\nE 0\n")
    with pytest.raises(FormatError):
        list(iter_batch_domains(bad))
    with pytest.raises(FormatError):
        merge_batches([bad], tmp_path / "d", tmp_path / "e")


def test_edge_file_header(tmp_path):
    build_batch_graph([PageLink("https://a.com/", "https://b.com/")], tmp_path / "b")
    merge_batches([tmp_path / "b"], tmp_path / "dict", tmp_path / "edges")
    assert edge_count(tmp_path / "edges") == 1
    raw = (tmp_path / "edges").read_bytes()
    assert raw[:8] == b"CGEDGE1\0"
    assert len(raw) == 16 + 16
