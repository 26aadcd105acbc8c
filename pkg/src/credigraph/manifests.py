"""Job manifests with content-hash rerun detection.

Every CLI run writes exactly one manifest next to its output.  The job
hash covers command, input file contents, and effective config; a rerun
with an identical hash and intact outputs is skipped unless forced.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

log = logging.getLogger(__name__)


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fp:
        for chunk in iter(lambda: fp.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _canonical(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass
class JobManifest:
    command: str
    inputs: dict[str, str]
    config: dict
    job_hash: str = ""
    outputs: list[str] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)
    started: str = ""
    finished: str = ""

    def save(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps({
            "command": self.command,
            "job_hash": self.job_hash,
            "inputs": self.inputs,
            "config": self.config,
            "outputs": self.outputs,
            "counters": self.counters,
            "started": self.started,
            "finished": self.finished,
        }, indent=1, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "JobManifest":
        data = json.loads(Path(path).read_text())
        return cls(
            command=data["command"],
            inputs=data.get("inputs", {}),
            config=data.get("config", {}),
            job_hash=data.get("job_hash", ""),
            outputs=data.get("outputs", []),
            counters=data.get("counters", {}),
            started=data.get("started", ""),
            finished=data.get("finished", ""),
        )


class Job:
    """One CLI run: hash inputs+config, detect reruns, record outcome."""

    def __init__(self, command: str, inputs: list[str | Path], config: dict,
                 manifest_path: str | Path):
        self.command = command
        self.manifest_path = Path(manifest_path)
        self.config = config
        self.input_hashes = {str(p): sha256_file(p) for p in sorted(map(str, inputs))}
        self.job_hash = hashlib.sha256(_canonical({
            "command": command,
            "inputs": self.input_hashes,
            "config": config,
        }).encode()).hexdigest()
        self.counters: dict[str, int] = {}
        self._started = _now()

    def already_done(self) -> bool:
        """True when a manifest with this hash exists and outputs are intact."""
        if not self.manifest_path.exists():
            return False
        try:
            previous = JobManifest.load(self.manifest_path)
        except (json.JSONDecodeError, KeyError):
            return False
        if previous.job_hash != self.job_hash:
            return False
        if not all(Path(out).exists() for out in previous.outputs):
            return False
        log.info("%s: unchanged inputs+config (hash %s), skipping",
                 self.command, self.job_hash[:12])
        return True

    def finish(self, outputs: list[str | Path]) -> JobManifest:
        manifest = JobManifest(
            command=self.command,
            inputs=self.input_hashes,
            config=self.config,
            job_hash=self.job_hash,
            outputs=[str(o) for o in outputs],
            counters=dict(self.counters),
            started=self._started,
            finished=_now(),
        )
        manifest.save(self.manifest_path)
        return manifest


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")
