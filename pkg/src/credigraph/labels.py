"""Credibility labels: DQR-style file loading, graph joins, and splits.

Split shuffling uses splitmix64 (64-bit state; Steele et al.'s finalizer
constants) with rejection-sampled bounded draws, so a (seed, data) pair
reproduces the identical split on any platform or language.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import FormatError, InputError
from .graphbuild import NodeDictionary
from .hostnames import normalize_host

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
DEFAULT_RATIOS = (0.6, 0.2, 0.2)
N_STRATA = 10


class SplitMix64:
    """splitmix64: state advances by 0x9E3779B97F4A7C15, output is the
    murmur-style finalizer of the new state.  Bounded draws use
    rejection sampling, so they are unbiased and implementation-pinned.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), rejecting the biased top range."""
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, high index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class CredibilityLabel:
    node: str
    pc1: float | None = None
    mbfc: float | None = None

    def score(self, target: str) -> float | None:
        if target == "pc1":
            return self.pc1
        if target == "mbfc":
            return self.mbfc
        raise InputError(f"unknown target {target!r}")


@dataclass
class DqrReport:
    rows_read: int = 0
    labels: int = 0
    rejected_range: int = 0
    rejected_domain: int = 0
    rejected_empty: int = 0
    duplicates: int = 0


def _parse_score(raw: str | None) -> tuple[float | None, bool]:
    """(value, ok); absent/blank is ok-None, unparseable or out of range is not."""
    if raw is None or not raw.strip():
        return None, True
    try:
        value = float(raw)
    except ValueError:
        return None, False
    if not (0.0 <= value <= 1.0):
        return None, False
    return value, True


def load_dqr(path: str | Path) -> tuple[list[CredibilityLabel], DqrReport]:
    """Load a delimited credibility-ratings file.

    Requires a header with ``domain`` plus ``pc1`` and/or ``mbfc``
    columns (extra columns ignored).  Rows with out-of-range scores are
    rejected and counted; duplicate domains resolve last-wins.
    """
    report = DqrReport()
    by_node: dict[str, CredibilityLabel] = {}
    with Path(path).open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        if reader.fieldnames is None:
            raise FormatError(f"{path}: empty label file")
        columns = {name.strip().lower(): name for name in reader.fieldnames}
        if "domain" not in columns:
            raise FormatError(f"{path}: no 'domain' column")
        if "pc1" not in columns and "mbfc" not in columns:
            raise FormatError(f"{path}: no score columns ('pc1'/'mbfc')")
        for row in reader:
            report.rows_read += 1
            domain_raw = (row.get(columns["domain"]) or "").strip()
            if "//" not in domain_raw:
                domain_raw = "http://" + domain_raw
            node = normalize_host(domain_raw)
            if node is None:
                report.rejected_domain += 1
                continue
            pc1, pc1_ok = _parse_score(row.get(columns.get("pc1", ""), None))
            mbfc, mbfc_ok = _parse_score(row.get(columns.get("mbfc", ""), None))
            if not (pc1_ok and mbfc_ok):
                report.rejected_range += 1
                continue
            if pc1 is None and mbfc is None:
                report.rejected_empty += 1
                continue
            if node in by_node:
                report.duplicates += 1
                log.warning("duplicate label for %s; keeping the later row", node)
            by_node[node] = CredibilityLabel(node=node, pc1=pc1, mbfc=mbfc)
    report.labels = len(by_node)
    return list(by_node.values()), report


def save_labels_json(
    path: str | Path, labels: Iterable[CredibilityLabel], meta: dict | None = None
) -> None:
    """Joined-labels artifact: node key -> scores, plus join metadata."""
    payload = dict(meta or {})
    payload["labels"] = {
        label.node: {"pc1": label.pc1, "mbfc": label.mbfc} for label in labels
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))


def load_labels_json(path: str | Path) -> list[CredibilityLabel]:
    data = json.loads(Path(path).read_text())
    return [
        CredibilityLabel(node=node, pc1=scores.get("pc1"), mbfc=scores.get("mbfc"))
        for node, scores in data["labels"].items()
    ]


def load_labels(path: str | Path) -> list[CredibilityLabel]:
    """Load labels from either a ratings CSV or a joined-labels JSON."""
    if str(path).endswith(".json"):
        return load_labels_json(path)
    labels, _ = load_dqr(path)
    return labels


@dataclass
class JoinReport:
    matched: int
    unmatched: list[str] = field(default_factory=list)


def join_labels(
    dictionary: NodeDictionary, labels: Iterable[CredibilityLabel]
) -> tuple[dict[int, CredibilityLabel], JoinReport]:
    """Exact node-key match of labels onto a dictionary."""
    joined: dict[int, CredibilityLabel] = {}
    unmatched: list[str] = []
    for label in labels:
        if label.node in dictionary:
            joined[dictionary.id_of(label.node)] = label
        else:
            unmatched.append(label.node)
    return joined, JoinReport(matched=len(joined), unmatched=unmatched)


# -------------------------------------------------------------------- splits

@dataclass
class RegressionSplit:
    target: str
    seed: int
    ratios: tuple[float, float, float]
    train: list[str]
    val: list[str]
    test: list[str]

    def save(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps({
            "target": self.target,
            "seed": self.seed,
            "ratios": list(self.ratios),
            "train": self.train,
            "val": self.val,
            "test": self.test,
        }, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "RegressionSplit":
        data = json.loads(Path(path).read_text())
        return cls(
            target=data["target"],
            seed=data["seed"],
            ratios=tuple(data["ratios"]),
            train=data["train"],
            val=data["val"],
            test=data["test"],
        )

    def to_ids(self, dictionary: NodeDictionary) -> tuple[list[int], list[int], list[int]]:
        return (
            [dictionary.id_of(k) for k in self.train],
            [dictionary.id_of(k) for k in self.val],
            [dictionary.id_of(k) for k in self.test],
        )


def allocate(count: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment; each part within 1 of ratio*count."""
    quotas = [ratio * count for ratio in ratios]
    parts = [int(q) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - parts[i]), i))
    for i in order[: count - sum(parts)]:
        parts[i] += 1
    return parts


def stratum_of(score: float, n_strata: int = N_STRATA) -> int:
    return min(int(score * n_strata), n_strata - 1)


def stratified_split(
    labels: Iterable[CredibilityLabel],
    target: str,
    seed: int,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    n_strata: int = N_STRATA,
) -> RegressionSplit:
    """Deterministic stratified split over equal-width score strata.

    Scores fall into ``n_strata`` equal-width buckets over [0, 1]; each
    bucket is key-sorted, shuffled by one splitmix64 stream (buckets in
    index order), and cut by largest-remainder 60/20/20.  Buckets with
    fewer than 3 members go entirely to train.
    """
    strata: list[list[str]] = [[] for _ in range(n_strata)]
    for label in labels:
        score = label.score(target)
        if score is None:
            continue
        strata[stratum_of(score, n_strata)].append(label.node)
    total = sum(len(s) for s in strata)
    if total < 10:
        raise InputError(f"need at least 10 labeled nodes for {target}, got {total}")

    rng = SplitMix64(seed)
    train: list[str] = []
    val: list[str] = []
    test: list[str] = []
    for members in strata:
        members.sort()
        if len(members) < 3:
            train.extend(members)
            continue
        rng.shuffle(members)
        n_train, n_val, _ = allocate(len(members), ratios)
        train.extend(members[:n_train])
        val.extend(members[n_train:n_train + n_val])
        test.extend(members[n_train + n_val:])
    return RegressionSplit(
        target=target, seed=seed, ratios=ratios, train=train, val=val, test=test
    )
