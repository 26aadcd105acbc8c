import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from taskgen import degree_task  # noqa: E402


@pytest.fixture(scope="session")
def degree_snapshot(tmp_path_factory):
    """The synthetic-degree task snapshot, shared across training tests."""
    out = tmp_path_factory.mktemp("degtask")
    manifest, split, labels, label_array = degree_task(
        out, n=2000, dmax=40, window=80, seed=0
    )
    return {
        "manifest": manifest,
        "split": split,
        "labels": labels,
        "label_array": label_array,
        "dir": out,
    }
