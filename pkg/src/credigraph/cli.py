"""Operator-facing pipeline CLI.

Each subcommand maps onto one module operation chain, writes its
artifact plus a job manifest, and skips reruns whose inputs and config
hash identically (override with --force).  Config precedence is
flags > --config file > defaults.  Logs go to stderr as JSON lines.

Exit codes: 0 success, 1 input/format error, 2 internal error,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import FormatError, InputError
from .degrees import (
    DegreeTable,
    compute_degrees,
    filter_by_degree,
    filter_report,
    load_compact_map,
)
from .embeddings import EmbeddingMatrix, PseudoProvider, ingest_embeddings, mrl_truncate
from .graphbuild import (
    NodeDictionary,
    build_batch_graph,
    edge_count,
    merge_batches,
)
from .gstats import compute_stats
from .hostnames import normalize_host
from .labels import (
    load_dqr,
    load_labels,
    join_labels,
    save_labels_json,
    stratified_split,
    RegressionSplit,
)
from .manifests import Job
from .regression import (
    MlpConfig,
    MlpModel,
    evaluate_mae,
    export_plot_data,
    train_mlp,
    write_plot_csv,
)
from .temporal import (
    SnapshotManifest,
    SnapshotView,
    assign_timestamp,
    build_temporal_graph,
    snapshot_diff,
)
from .textstore import (
    StubFetcher,
    fetch_missing,
    group_documents,
    iter_bundles,
    iter_groups,
    sample_representative,
    write_bundles,
)
from .warc import extract_wat_links, extract_wet_document, open_archive, RecordRejected
from .warcgen import generate_corpus

log = logging.getLogger("credigraph")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_USAGE = 64

DEFAULTS = {
    "threshold": 3,
    "batch_size": 300,
    "dim": 1024,
    "mrl": 128,
    "seed": 0,
    "target": "pc1",
    "workers": 1,
    "limit": 32768,
    "learning_rate": 0.001,
    "max_iterations": 200,
    "patience": 20,
    "hidden_dims": [128, 64],
    "ratios": [0.6, 0.2, 0.2],
    "fanouts": [50, 50, 50],
}

_ARCHIVE_SUFFIXES = (".warc", ".warc.gz", ".wat", ".wat.gz", ".wet", ".wet.gz")


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageExit(message)


class _JsonLineFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps({
            "ts": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
        })


def _setup_logging(level: str) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonLineFormatter())
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(getattr(logging, level.upper(), logging.INFO))


def scratch_root() -> str | None:
    return os.environ.get("CREDIGRAPH_SCRATCH")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"bad config file {path}: {exc}") from exc


def _get(args, config: dict, name: str):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, DEFAULTS.get(name))


def _archive_files(root: Path) -> list[Path]:
    if root.is_file():
        return [root]
    files = [
        p for p in sorted(root.rglob("*"))
        if p.is_file() and any(p.name.endswith(s) for s in _ARCHIVE_SUFFIXES)
    ]
    if not files:
        raise InputError(f"no archive files under {root}")
    return files


def _dir_job_manifest(out_dir: Path) -> Path:
    return out_dir / "job-manifest.json"


def _file_job_manifest(out_file: Path) -> Path:
    return out_file.with_name(out_file.name + ".job.json")


# ------------------------------------------------------------- gen-fixtures

def cmd_gen_fixtures(args) -> int:
    config = _load_config(args.config)
    out_dir = Path(args.out)
    months = args.months
    job_config = {
        "domains": args.domains, "links": args.links, "seed": _get(args, config, "seed"),
        "months": months,
    }
    job = Job("gen-fixtures", [], job_config, _dir_job_manifest(out_dir))
    if not args.force and job.already_done():
        return EXIT_OK

    starts = ["2024-10-03", "2024-10-31", "2024-12-05", "2025-01-02"]
    outputs = []
    for month in range(months):
        month_dir = out_dir / f"month-{month:02d}" if months > 1 else out_dir
        truth = generate_corpus(
            month_dir,
            n_domains=args.domains,
            n_links=args.links,
            seed=job_config["seed"],
            snapshot_id=f"FIXTURE-M{month}",
            crawl_start=starts[month % len(starts)],
            link_variant=month,
        )
        outputs.append(month_dir / "ground_truth.json")
        job.counters[f"month{month}_nodes"] = truth.n_nodes
        job.counters[f"month{month}_edges"] = truth.n_edges
    job.finish(outputs)
    log.info("fixtures written under %s", out_dir)
    return EXIT_OK


# -------------------------------------------------------------- build-graph

def _build_one_batch(paths: list[Path], batch_path: Path, include_all: bool):
    errors = []

    def links():
        for path in paths:
            reader = open_archive(path)
            for record in reader:
                if record.record_type != "metadata":
                    continue
                try:
                    yield from extract_wat_links(record, include_all_links=include_all)
                except RecordRejected:
                    pass
            errors.extend(reader.errors)

    result = build_batch_graph(links(), batch_path)
    return result, len(errors)


def cmd_build_graph(args) -> int:
    config = _load_config(args.config)
    out_dir = Path(args.out)
    files = _archive_files(Path(args.input))
    batch_size = _get(args, config, "batch_size")
    workers = _get(args, config, "workers")
    include_all = bool(args.include_all_links)
    job_config = {
        "batch_size": batch_size, "include_all_links": include_all,
        "snapshot_id": args.snapshot_id, "crawl_start": args.crawl_start,
    }
    job = Job("build-graph", files, job_config, _dir_job_manifest(out_dir))
    if not args.force and job.already_done():
        return EXIT_OK

    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=scratch_root()) as scratch:
        batches = [files[i:i + batch_size] for i in range(0, len(files), batch_size)]
        batch_paths = [Path(scratch) / f"batch-{i:05d}" for i in range(len(batches))]
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            outcomes = list(pool.map(
                lambda pair: _build_one_batch(pair[0], pair[1], include_all),
                zip(batches, batch_paths),
            ))
        results = [r for r, _ in outcomes]
        record_errors = sum(e for _, e in outcomes)
        dictionary, n_edges = merge_batches(
            batch_paths, out_dir / "dictionary.txt", out_dir / "edges.bin"
        )

    compute_degrees(out_dir / "edges.bin", len(dictionary), out_dir / "degrees.bin")
    stamp = assign_timestamp(args.snapshot_id, args.crawl_start)
    manifest = SnapshotManifest(
        snapshot_id=args.snapshot_id,
        timestamp=stamp.isoformat(),
        files={"dictionary": "dictionary.txt", "edges": "edges.bin",
               "degrees": "degrees.bin"},
        counts={"nodes": len(dictionary), "edges": n_edges},
        format_versions={"edges": "CGEDGE1", "degrees": "CGDEG1"},
    )
    manifest.save(out_dir / "manifest.json")

    job.counters.update({
        "archives": len(files),
        "batches": len(batches),
        "links_seen": sum(r.links_seen for r in results),
        "links_rejected": sum(r.links_rejected for r in results),
        "self_loops_dropped": sum(r.self_loops_dropped for r in results),
        "record_errors": record_errors,
        "nodes": len(dictionary),
        "edges": n_edges,
    })
    job.finish([out_dir / "dictionary.txt", out_dir / "edges.bin",
                out_dir / "degrees.bin", out_dir / "manifest.json"])
    log.info("graph built: %d nodes, %d edges", len(dictionary), n_edges)
    return EXIT_OK


# ------------------------------------------------------------------- filter

def _snapshot_inputs(snap_dir: Path) -> tuple[SnapshotManifest, list[Path]]:
    manifest_path = snap_dir / "manifest.json"
    if not manifest_path.exists():
        raise InputError(f"{snap_dir} has no snapshot manifest.json")
    manifest = SnapshotManifest.load(manifest_path)
    files = [snap_dir / rel for rel in manifest.files.values()]
    return manifest, files + [manifest_path]


def cmd_filter(args) -> int:
    config = _load_config(args.config)
    snap_dir = Path(args.snapshot)
    out_dir = Path(args.out)
    threshold = _get(args, config, "threshold")
    manifest, inputs = _snapshot_inputs(snap_dir)
    job = Job("filter", inputs, {"threshold": threshold}, _dir_job_manifest(out_dir))
    if not args.force and job.already_done():
        return EXIT_OK

    degrees = DegreeTable(snap_dir / manifest.files["degrees"])
    filtered = filter_by_degree(
        snap_dir / manifest.files["edges"], degrees, out_dir,
        threshold=threshold, provenance=manifest.snapshot_id,
    )

    raw_dictionary = NodeDictionary.load(snap_dir / manifest.files["dictionary"])
    mapping = load_compact_map(filtered.compact_map_path)
    survivors = [raw_dictionary.key_of(raw_id) for raw_id in sorted(mapping)]
    NodeDictionary(survivors).save(out_dir / "dictionary.txt")
    compute_degrees(out_dir / "edges.bin", filtered.survivor_count, out_dir / "degrees.bin")

    report = filter_report(
        filtered.raw_node_count, filtered.raw_edge_count,
        filtered.survivor_count, filtered.edge_count,
    )
    (out_dir / "retention.json").write_text(json.dumps({
        "threshold": threshold,
        "raw_nodes": filtered.raw_node_count,
        "raw_edges": filtered.raw_edge_count,
        "filtered_nodes": filtered.survivor_count,
        "filtered_edges": filtered.edge_count,
        "node_retention_pct": report.node_retention_pct,
        "edge_retention_pct": report.edge_retention_pct,
    }, indent=1))

    out_manifest = SnapshotManifest(
        snapshot_id=manifest.snapshot_id,
        timestamp=manifest.timestamp,
        files={"dictionary": "dictionary.txt", "edges": "edges.bin",
               "degrees": "degrees.bin", "compact_map": "compact_map.tsv",
               "retention": "retention.json"},
        counts={"nodes": filtered.survivor_count, "edges": filtered.edge_count,
                "raw_nodes": filtered.raw_node_count, "raw_edges": filtered.raw_edge_count},
        format_versions={"edges": "CGEDGE1", "degrees": "CGDEG1"},
    )
    out_manifest.save(out_dir / "manifest.json")
    job.counters.update({"nodes": filtered.survivor_count, "edges": filtered.edge_count})
    job.finish([out_dir / "edges.bin", out_dir / "dictionary.txt",
                out_dir / "degrees.bin", out_dir / "retention.json",
                out_dir / "manifest.json"])
    log.info("filtered at threshold %d: kept %.2f%% nodes, %.2f%% edges",
             threshold, report.node_retention_pct, report.edge_retention_pct)
    return EXIT_OK


# -------------------------------------------------------------------- stats

def cmd_stats(args) -> int:
    snap_dir = Path(args.snapshot)
    manifest, inputs = _snapshot_inputs(snap_dir)
    out_path = Path(args.out) if args.out else snap_dir / "stats.json"
    job = Job("stats", inputs, {}, _file_job_manifest(out_path))
    if not args.force and job.already_done():
        print((out_path).read_text())
        return EXIT_OK

    degrees = DegreeTable(snap_dir / manifest.files["degrees"])
    n_edges = edge_count(snap_dir / manifest.files["edges"])
    report = compute_stats(degrees, n_edges)
    out_path.write_text(report.to_json())
    print(report.table())
    job.counters.update({"nodes": report.n_nodes, "edges": report.n_edges})
    job.finish([out_path])
    return EXIT_OK


# ------------------------------------------------------------- extract-text

def cmd_extract_text(args) -> int:
    config = _load_config(args.config)
    out_path = Path(args.out)
    files = _archive_files(Path(args.input))
    limit = _get(args, config, "limit")
    inputs = list(files)
    restrict_keys: set[str] | None = None
    if args.snapshot:
        _, snap_inputs = _snapshot_inputs(Path(args.snapshot))
        inputs += snap_inputs
        restrict_keys = set(
            NodeDictionary.load(Path(args.snapshot) / "dictionary.txt").id_to_key
        )
    if args.fetch_stub:
        inputs.append(Path(args.fetch_stub))
    job = Job("extract-text", inputs, {"limit": limit}, _file_job_manifest(out_path))
    if not args.force and job.already_done():
        return EXIT_OK

    rejected = 0

    def documents():
        nonlocal rejected
        for path in files:
            for record in open_archive(path):
                if record.record_type != "conversion":
                    continue
                try:
                    yield extract_wet_document(record)
                except RecordRejected:
                    rejected += 1

    with tempfile.TemporaryDirectory(dir=scratch_root()) as scratch:
        index = group_documents(documents(), Path(scratch) / "grouped.jsonl")
        bundled_keys: set[str] = set()
        out_of_graph = 0

        def bundles():
            nonlocal out_of_graph
            for key, group in iter_groups(index.path):
                if restrict_keys is not None and key not in restrict_keys:
                    out_of_graph += 1
                    continue
                bundled_keys.add(key)
                yield sample_representative(key, group, limit=limit)

        count = write_bundles(out_path, bundles())

    fetched = missing = 0
    if restrict_keys is not None:
        still_missing = sorted(restrict_keys - bundled_keys)
        if args.fetch_stub and still_missing:
            pages = json.loads(Path(args.fetch_stub).read_text())
            outcome = fetch_missing(still_missing, StubFetcher(pages),
                                    fetch_time=datetime.now(timezone.utc).isoformat(),
                                    limit=limit)
            if outcome.bundles:
                # append fetched bundles by rewriting the store
                existing = list(iter_bundles(out_path))
                count = write_bundles(out_path, existing + outcome.bundles)
            fetched = len(outcome.bundles)
            missing = len(outcome.misses) + len(outcome.failures)
        else:
            missing = len(still_missing)

    job.counters.update({
        "wet_documents": index.n_documents,
        "rejected_records": rejected,
        "skipped_urls": index.skipped,
        "domains_with_text": index.n_domains,
        "out_of_graph": out_of_graph,
        "bundles": count,
        "fetched": fetched,
        "missing": missing,
    })
    job.finish([out_path])
    log.info("wrote %d bundles (%d fetched, %d missing)", count, fetched, missing)
    return EXIT_OK


# -------------------------------------------------------------------- embed

def cmd_embed(args) -> int:
    config = _load_config(args.config)
    out_path = Path(args.out)
    bundles_path = Path(args.bundles)
    dim = _get(args, config, "dim")
    seed = _get(args, config, "seed")
    mrl = args.mrl if args.mrl is not None else config.get("mrl", 0)
    if args.provider != "pseudo":
        raise InputError(f"unknown embedding provider {args.provider!r} "
                         "(desk mode supports 'pseudo')")
    job = Job("embed", [bundles_path],
              {"dim": dim, "seed": seed, "mrl": mrl, "provider": args.provider},
              _file_job_manifest(out_path))
    if not args.force and job.already_done():
        return EXIT_OK

    provider = PseudoProvider(dim=dim, seed=seed)
    matrix, report = ingest_embeddings(
        iter_bundles(bundles_path), provider, out_path=out_path
    )
    outputs = [out_path]
    if mrl:
        small = mrl_truncate(matrix, mrl)
        mrl_path = out_path.with_name(f"{out_path.stem}.mrl{mrl}{out_path.suffix}")
        small.save(mrl_path)
        outputs.append(mrl_path)
    job.counters.update({"rows": report.rows, "misses": len(report.misses)})
    job.finish(outputs)
    log.info("embedded %d domains at dim %d", report.rows, dim)
    return EXIT_OK


# -------------------------------------------------------------- join-labels

def cmd_join_labels(args) -> int:
    out_path = Path(args.out)
    snap_dir = Path(args.snapshot)
    labels_path = Path(args.labels)
    _, snap_inputs = _snapshot_inputs(snap_dir)
    job = Job("join-labels", [labels_path] + snap_inputs, {}, _file_job_manifest(out_path))
    if not args.force and job.already_done():
        return EXIT_OK

    labels, load_report = load_dqr(labels_path)
    dictionary = NodeDictionary.load(snap_dir / "dictionary.txt")
    joined, join_rep = join_labels(dictionary, labels)
    save_labels_json(
        out_path,
        joined.values(),
        meta={
            "source": str(labels_path),
            "snapshot": str(snap_dir),
            "matched": join_rep.matched,
            "unmatched": sorted(join_rep.unmatched),
            "load_report": vars(load_report),
        },
    )
    job.counters.update({
        "labels_loaded": load_report.labels,
        "matched": join_rep.matched,
        "unmatched": len(join_rep.unmatched),
    })
    job.finish([out_path])
    log.info("joined %d/%d labels onto the graph", join_rep.matched, load_report.labels)
    return EXIT_OK


# -------------------------------------------------------------------- split

def cmd_split(args) -> int:
    config = _load_config(args.config)
    out_path = Path(args.out)
    labels_path = Path(args.labels)
    target = _get(args, config, "target")
    seed = _get(args, config, "seed")
    job = Job("split", [labels_path], {"target": target, "seed": seed},
              _file_job_manifest(out_path))
    if not args.force and job.already_done():
        return EXIT_OK

    labels = load_labels(labels_path)
    split = stratified_split(labels, target, seed=seed)
    split.save(out_path)
    job.counters.update({
        "train": len(split.train), "val": len(split.val), "test": len(split.test),
    })
    job.finish([out_path])
    log.info("split %s: %d/%d/%d", target, len(split.train), len(split.val), len(split.test))
    return EXIT_OK


# --------------------------------------------------------------------- diff

def cmd_diff(args) -> int:
    prev_path, next_path = Path(args.prev), Path(args.next)
    out_path = Path(args.out)
    prev_manifest = SnapshotManifest.load(prev_path)
    next_manifest = SnapshotManifest.load(next_path)
    inputs = [prev_path, next_path]
    for base, manifest in ((prev_path.parent, prev_manifest), (next_path.parent, next_manifest)):
        inputs += [base / manifest.files[k] for k in ("dictionary", "degrees")]
    job = Job("diff", inputs, {}, _file_job_manifest(out_path))
    if not args.force and job.already_done():
        return EXIT_OK

    diff = snapshot_diff(
        SnapshotView.from_manifest(prev_path), SnapshotView.from_manifest(next_path)
    )
    out_path.write_text(json.dumps({
        "prev": prev_manifest.snapshot_id,
        "next": next_manifest.snapshot_id,
        "overlap_nodes": diff.overlap_nodes,
        "new_nodes": diff.new_nodes,
        "vanished_nodes": diff.vanished_nodes,
        "out_degree_increased_fraction": diff.out_degree_increased_fraction,
    }, indent=1))
    job.counters.update({"overlap": diff.overlap_nodes})
    job.finish([out_path])
    return EXIT_OK


# -------------------------------------------------------- assemble-temporal

def cmd_assemble_temporal(args) -> int:
    out_path = Path(args.out)
    paths = [Path(p) for p in args.manifests]
    job = Job("assemble-temporal", paths, {}, _file_job_manifest(out_path))
    if not args.force and job.already_done():
        return EXIT_OK
    manifests = build_temporal_graph(paths, out_path)
    job.counters["snapshots"] = len(manifests)
    job.finish([out_path])
    return EXIT_OK


# ---------------------------------------------------------------- train-mlp

def _mlp_config(args, config: dict) -> MlpConfig:
    hidden = _get(args, config, "hidden_dims")
    if isinstance(hidden, str):
        hidden = [int(p) for p in hidden.split(",") if p]
    return MlpConfig(
        hidden_dims=tuple(hidden),
        learning_rate=_get(args, config, "learning_rate"),
        max_iterations=_get(args, config, "max_iterations"),
        patience=_get(args, config, "patience"),
        seed=_get(args, config, "seed"),
    )


def cmd_train_mlp(args) -> int:
    config = _load_config(args.config)
    out_dir = Path(args.out)
    features_path, labels_path, split_path = map(Path, (args.features, args.labels, args.split))
    mlp_config = _mlp_config(args, config)
    target = args.target
    job = Job("train-mlp", [features_path, labels_path, split_path],
              {"target": target, **vars(mlp_config), "hidden_dims": list(mlp_config.hidden_dims)},
              _dir_job_manifest(out_dir))
    if not args.force and job.already_done():
        return EXIT_OK

    out_dir.mkdir(parents=True, exist_ok=True)
    matrix = EmbeddingMatrix.load(features_path)
    labels = {l.node: l for l in load_labels(labels_path)}
    split = RegressionSplit.load(split_path)
    if target and split.target != target:
        raise InputError(f"split targets {split.target!r} but --target is {target!r}")
    model, report = train_mlp(matrix, labels, split, mlp_config)
    (out_dir / "report.json").write_text(report.to_json())
    model.save(out_dir / "model.npz")
    job.counters.update({"train": len(split.train), "test": len(split.test)})
    job.finish([out_dir / "report.json", out_dir / "model.npz"])
    log.info("test MAE %.4f (mean baseline %.4f)", report.mae_test, report.baseline_mae_test)
    return EXIT_OK


# -------------------------------------------------------------------- export

def cmd_export(args) -> int:
    out_dir = Path(args.out)
    model_path, features_path = Path(args.model), Path(args.features)
    labels_path, split_path = Path(args.labels), Path(args.split)
    job = Job("export", [model_path, features_path, labels_path, split_path], {},
              _dir_job_manifest(out_dir))
    if not args.force and job.already_done():
        return EXIT_OK

    out_dir.mkdir(parents=True, exist_ok=True)
    model = MlpModel.load(model_path)
    matrix = EmbeddingMatrix.load(features_path)
    labels = {l.node: l for l in load_labels(labels_path)}
    split = RegressionSplit.load(split_path)
    x = np.asarray([matrix.rows[key] for key in split.test])
    y = np.asarray([labels[key].score(split.target) for key in split.test])
    plot = export_plot_data(model, x, y)
    write_plot_csv(plot, out_dir / "scatter.csv", out_dir / "histogram.csv")
    job.counters.update({"points": len(plot.pairs), "test_mae_x10000": int(
        round(evaluate_mae(model, x, y) * 10000))})
    job.finish([out_dir / "scatter.csv", out_dir / "histogram.csv"])
    return EXIT_OK


# --------------------------------------------------------------------- main

def build_parser() -> _Parser:
    parser = _Parser(prog="credigraph", description=__doc__)
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--force", action="store_true", help="rerun even if unchanged")

    p = sub.add_parser("gen-fixtures", help="write a synthetic crawl corpus")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--domains", type=int, default=200)
    p.add_argument("--links", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--months", type=int, default=1)
    p.set_defaults(func=cmd_gen_fixtures)

    p = sub.add_parser("build-graph", help="archives -> domain graph snapshot")
    common(p)
    p.add_argument("--input", required=True, help="archive file or directory")
    p.add_argument("--out", required=True, help="snapshot output directory")
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--include-all-links", action="store_true", default=None)
    p.add_argument("--snapshot-id", dest="snapshot_id", default="SNAPSHOT")
    p.add_argument("--crawl-start", dest="crawl_start", default="2024-12-02")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("filter", help="degree-filter a snapshot")
    common(p)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=int)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("stats", help="structural statistics of a snapshot")
    common(p)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("extract-text", help="WET archives -> per-domain bundles")
    common(p)
    p.add_argument("--input", required=True, help="WET file or directory")
    p.add_argument("--out", required=True, help="bundle store path")
    p.add_argument("--snapshot", help="restrict to this snapshot's domains")
    p.add_argument("--fetch-stub", dest="fetch_stub",
                   help="JSON map of node key -> homepage text for missing domains")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_extract_text)

    p = sub.add_parser("embed", help="bundles -> embedding matrix")
    common(p)
    p.add_argument("--bundles", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--provider", default="pseudo")
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mrl", type=int, help="also write a truncated matrix at this dim")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("join-labels", help="ratings file -> graph-joined labels")
    common(p)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_join_labels)

    p = sub.add_parser("split", help="stratified train/val/test split")
    common(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--target", choices=("pc1", "mbfc"))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("diff", help="compare two snapshots by node key")
    common(p)
    p.add_argument("--prev", required=True, help="previous snapshot manifest")
    p.add_argument("--next", required=True, help="next snapshot manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("assemble-temporal", help="order snapshots into a temporal graph")
    common(p)
    p.add_argument("--manifests", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assemble_temporal)

    p = sub.add_parser("train-mlp", help="embeddings + labels -> regression report")
    common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target", choices=("pc1", "mbfc"))
    p.add_argument("--seed", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--max-iterations", dest="max_iterations", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--hidden-dims", dest="hidden_dims")
    p.set_defaults(func=cmd_train_mlp)

    p = sub.add_parser("export", help="trained model -> plot data CSVs")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _setup_logging(args.log_level)
    try:
        return args.func(args)
    except (InputError, FormatError, FileNotFoundError, NotADirectoryError) as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
