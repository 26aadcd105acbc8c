#!/usr/bin/env python3
"""Stream records out of WARC-family archives.

Writes a small WAT + WET corpus, iterates it record by record, and shows
the skip-and-continue behaviour on a corrupted gzip member.
"""

import tempfile
from datetime import datetime, timezone
from pathlib import Path

from credigraph.warc import extract_wat_links, extract_wet_document, open_archive
from credigraph.warcgen import corrupt_member, wat_record, wet_record, write_archive

date = datetime(2024, 12, 5, tzinfo=timezone.utc)
workdir = Path(tempfile.mkdtemp(prefix="credigraph-demo-"))

wat_path = workdir / "links.wat.gz"
write_archive(wat_path, [
    wat_record("https://news.example.com/story", date,
               ["https://other.org/ref", "/related", "https://cdn.example.com/a"]),
    wat_record("https://other.org/ref", date, ["https://news.example.com/"]),
])

wet_path = workdir / "text.wet.gz"
write_archive(wet_path, [
    wet_record("https://news.example.com/story", date,
               "A story about the open web.", ["eng"]),
    wet_record("https://other.org/ref", date, "Référence à l'article.", ["fra"]),
])

print("== WAT records and their links ==")
for record in open_archive(wat_path):
    for link in extract_wat_links(record):
        print(f"  {link.source_url} -> {link.target_url}")

print("\n== WET documents ==")
for record in open_archive(wet_path):
    doc = extract_wet_document(record)
    print(f"  {doc.url} [{','.join(doc.languages)}] {doc.text_length} chars: {doc.text!r}")

print("\n== corrupting member 0 of the WET file ==")
corrupt_member(wet_path, 0)
reader = open_archive(wet_path)
survivors = [record.target_uri for record in reader]
print(f"  surviving records: {survivors}")
print(f"  recorded errors:   {[(e.offset, e.reason) for e in reader.errors]}")
