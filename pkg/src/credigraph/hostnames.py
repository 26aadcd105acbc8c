"""Canonical host keys for graph nodes.

A node key is the reversed-host form of a URL's hostname
(``news.example.com`` -> ``com.example.news``), which clusters related
hosts under lexicographic sort.  Subdomains and their parent domain stay
distinct keys.
"""

from __future__ import annotations

from urllib.parse import urlsplit

__all__ = ["normalize_host", "key_to_host"]


def normalize_host(url: str) -> str | None:
    """Turn an absolute URL into a reversed-host node key.

    Lowercases the hostname, strips port, userinfo, path and trailing
    dot, then reverses the label order.  Returns ``None`` for hosts that
    are not web domains: IP literals (v4 or v6), empty hosts, and
    single-label hosts such as ``localhost``.
    """
    try:
        host = urlsplit(url).hostname
    except ValueError:
        return None
    if not host:
        return None
    host = host.lower().rstrip(".")
    if not host or "." not in host:
        return None
    if ":" in host:  # bracketed IPv6 literal (urlsplit strips the brackets)
        return None
    if host.replace(".", "").isdigit():  # dotted-quad / all-numeric pseudo-host
        return None
    labels = host.split(".")
    if any(not label for label in labels):
        return None
    return ".".join(reversed(labels))


def key_to_host(key: str) -> str:
    """Inverse of :func:`normalize_host`'s label reversal."""
    return ".".join(reversed(key.split(".")))
