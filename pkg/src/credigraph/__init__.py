"""Temporal domain-level web graphs from web-archive crawls.

Streaming WARC/WAT/WET decoding, external-memory host-graph construction,
degree filtering, per-domain text sampling, credibility labels and splits,
embeddings, and MAE regression baselines.
"""

__version__ = "0.1.0"


class CrediGraphError(Exception):
    """Base class for all package errors."""


class FormatError(CrediGraphError):
    """An artifact file has a wrong or unsupported version header."""


class InputError(CrediGraphError):
    """Bad input data or parameters (maps to CLI exit code 1)."""
