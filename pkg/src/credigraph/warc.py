"""Streaming reader for WARC-family archives (WARC/WAT/WET).

Archives are either plain record streams or, conventionally, one gzip
member per record.  Decoding is streaming in both cases: peak memory is
bounded by a single record, never the file.  Corrupt gzip members are
skipped with a recorded error and iteration resumes at the next member.
"""

from __future__ import annotations

import json
import logging
import zlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from io import BytesIO
from pathlib import Path
from typing import BinaryIO, Iterator
from urllib.parse import urljoin, urlsplit

from . import CrediGraphError

log = logging.getLogger(__name__)

_GZIP_MAGIC = b"\x1f\x8b"
_CHUNK = 1 << 16

RECORD_TYPES = ("warcinfo", "response", "metadata", "conversion")


class RecordRejected(CrediGraphError):
    """A record cannot be converted to the requested document type."""

    def __init__(self, reason: str, record: "WarcRecord | None" = None):
        super().__init__(reason)
        self.reason = reason
        self.record = record


@dataclass(frozen=True)
class RecordError:
    """A record-level decode failure; iteration continued past it."""

    path: str
    offset: int
    reason: str


@dataclass(frozen=True)
class WarcRecord:
    record_type: str
    target_uri: str | None
    date: datetime | None
    content_length: int
    headers: dict[str, str]
    payload: bytes

    def header(self, name: str) -> str | None:
        """Case-insensitive header lookup."""
        lname = name.lower()
        for key, value in self.headers.items():
            if key.lower() == lname:
                return value
        return None


@dataclass(frozen=True)
class WetDocument:
    url: str
    fetch_time: datetime | None
    languages: list[str]
    text: str

    @property
    def text_length(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class PageLink:
    source_url: str
    target_url: str


def parse_warc_date(value: str) -> datetime | None:
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00")).astimezone(timezone.utc)
    except ValueError:
        return None


def _make_record(headers: dict[str, str], payload: bytes) -> WarcRecord:
    def get(name: str) -> str | None:
        lname = name.lower()
        for key, value in headers.items():
            if key.lower() == lname:
                return value
        return None

    rtype = (get("WARC-Type") or "").lower()
    if rtype not in RECORD_TYPES:
        rtype = "other"
    date_raw = get("WARC-Date")
    return WarcRecord(
        record_type=rtype,
        target_uri=get("WARC-Target-URI"),
        date=parse_warc_date(date_raw) if date_raw else None,
        content_length=len(payload),
        headers=headers,
        payload=payload,
    )


def _parse_records(
    fp: BinaryIO, path: str, offset: int, errors: list[RecordError]
) -> Iterator[WarcRecord]:
    """Parse consecutive WARC records from a byte stream."""
    while True:
        line = fp.readline()
        if not line:
            return
        if not line.strip():
            continue
        if not line.startswith(b"WARC/"):
            errors.append(
                RecordError(path, offset, f"expected WARC version line, got {line[:24]!r}")
            )
            return
        headers: dict[str, str] = {}
        while True:
            hline = fp.readline()
            if not hline or not hline.strip():
                break
            if b":" not in hline:
                continue
            name, _, value = hline.partition(b":")
            headers[name.strip().decode("utf-8", "replace")] = value.strip().decode(
                "utf-8", "replace"
            )
        length_raw = next(
            (v for k, v in headers.items() if k.lower() == "content-length"), "0"
        )
        try:
            length = int(length_raw)
        except ValueError:
            errors.append(RecordError(path, offset, f"bad Content-Length {length_raw!r}"))
            return
        payload = fp.read(length)
        if len(payload) < length:
            errors.append(RecordError(path, offset, "truncated record payload"))
            return
        yield _make_record(headers, payload)


def _iter_gzip_members(
    stream: BinaryIO, path: str, errors: list[RecordError]
) -> Iterator[tuple[int, bytes]]:
    """Yield (member start offset, decompressed bytes) for each gzip member.

    Corrupt or truncated members append a RecordError and iteration
    resyncs at the next gzip magic.  The compressed bytes of the member
    being decoded are retained until it completes, so memory stays
    proportional to one member.
    """
    buf = b""
    base = 0  # file offset of buf[0]
    eof = False

    def refill() -> None:
        nonlocal buf, eof
        chunk = stream.read(_CHUNK)
        if chunk:
            buf += chunk
        else:
            eof = True

    while True:
        if not buf:
            refill()
            if not buf:
                return
        member_start = base
        decomp = zlib.decompressobj(wbits=31)
        parts: list[bytes] = []
        consumed = 0
        ok = None
        while ok is None:
            if consumed == len(buf):
                refill()
                if consumed == len(buf):
                    errors.append(RecordError(path, member_start, "truncated gzip member"))
                    ok = False
                    break
            try:
                parts.append(decomp.decompress(buf[consumed:]))
            except zlib.error as exc:
                errors.append(
                    RecordError(path, member_start, f"corrupt gzip member: {exc}")
                )
                ok = False
                break
            if decomp.eof:
                consumed = len(buf) - len(decomp.unused_data)
                ok = True
            else:
                consumed = len(buf)
        if ok:
            base += consumed
            buf = buf[consumed:]
            yield member_start, b"".join(parts)
            continue
        # Resync: drop this member's own magic, then scan for the next one.
        drop = min(2, len(buf))
        base += drop
        buf = buf[drop:]
        while True:
            idx = buf.find(_GZIP_MAGIC)
            if idx >= 0:
                base += idx
                buf = buf[idx:]
                break
            if eof:
                return
            keep = buf[-1:]  # magic may straddle the chunk boundary
            base += len(buf) - len(keep)
            buf = keep
            refill()
            if eof and len(buf) <= 1:
                return


class ArchiveReader:
    """Single-consumer iterator over the records of one archive file.

    Record-level failures (corrupt members, malformed framing) land in
    ``errors`` and do not stop iteration.  Independent readers over
    different files share no state.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.errors: list[RecordError] = []

    def __iter__(self) -> Iterator[WarcRecord]:
        with self.path.open("rb") as fp:
            head = fp.read(2)
            fp.seek(0)
            if head == _GZIP_MAGIC:
                for offset, data in _iter_gzip_members(fp, str(self.path), self.errors):
                    yield from _parse_records(
                        BytesIO(data), str(self.path), offset, self.errors
                    )
            else:
                yield from _parse_records(fp, str(self.path), 0, self.errors)
        for err in self.errors:
            log.debug("record error in %s @%d: %s", err.path, err.offset, err.reason)


def open_archive(path: str | Path) -> ArchiveReader:
    """Open a WARC/WAT/WET file for streaming record iteration."""
    reader = ArchiveReader(path)
    reader.path.open("rb").close()  # surface open errors eagerly
    return reader


def _resolve(base: str | None, url: str) -> str | None:
    try:
        absolute = urljoin(base, url) if base else url
        parts = urlsplit(absolute)
    except ValueError:
        return None
    if not parts.scheme or not parts.netloc:
        return None
    return absolute


def extract_wat_links(record: WarcRecord, include_all_links: bool = False) -> list[PageLink]:
    """Pull page links out of a WAT metadata record.

    Anchor (``A@/href``) entries are always included; other link kinds
    (images, scripts, stylesheets, head links) only when
    ``include_all_links`` is set.  Targets are resolved against the
    record's target URI; unresolvable entries are skipped.
    """
    if record.record_type != "metadata":
        raise RecordRejected(f"not a metadata record: {record.record_type}", record)
    try:
        envelope = json.loads(record.payload)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise RecordRejected(f"WAT payload is not valid JSON: {exc}", record) from exc
    if not isinstance(envelope, dict):
        raise RecordRejected("WAT payload is not a JSON object", record)

    html_meta = (
        envelope.get("Envelope", {})
        .get("Payload-Metadata", {})
        .get("HTTP-Response-Metadata", {})
        .get("HTML-Metadata", {})
    )
    if not isinstance(html_meta, dict):
        return []
    base = record.target_uri
    source = base or ""
    links: list[PageLink] = []

    entries = html_meta.get("Links", [])
    if isinstance(entries, list):
        for entry in entries:
            if not isinstance(entry, dict):
                continue
            url = entry.get("url")
            if not isinstance(url, str) or not url:
                continue
            kind = entry.get("path", "")
            if not include_all_links and not str(kind).startswith("A@"):
                continue
            target = _resolve(base, url)
            if target is not None:
                links.append(PageLink(source, target))

    if include_all_links:
        head = html_meta.get("Head", {})
        if isinstance(head, dict):
            for group in ("Link", "Scripts"):
                entries = head.get(group, [])
                if not isinstance(entries, list):
                    continue
                for entry in entries:
                    if not isinstance(entry, dict):
                        continue
                    url = entry.get("url")
                    if not isinstance(url, str) or not url:
                        continue
                    target = _resolve(base, url)
                    if target is not None:
                        links.append(PageLink(source, target))
    return links


def extract_wet_document(record: WarcRecord) -> WetDocument:
    """Turn a WET conversion record into a plain-text document."""
    if record.record_type != "conversion":
        raise RecordRejected(f"not a conversion record: {record.record_type}", record)
    url = record.target_uri
    if not url:
        raise RecordRejected("conversion record has no WARC-Target-URI", record)
    lang_raw = record.header("WARC-Identified-Content-Language") or ""
    languages = [part.strip() for part in lang_raw.split(",") if part.strip()]
    text = record.payload.decode("utf-8", errors="replace")
    return WetDocument(url=url, fetch_time=record.date, languages=languages, text=text)
