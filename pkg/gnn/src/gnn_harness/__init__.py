"""GNN node regression over exported snapshot artifacts.

Consumes the pipeline's published file formats (edge lists, node
dictionaries, embedding matrices, split and label files) and trains
neighbor-sampled GNNs for credibility-score regression.
"""

__version__ = "0.1.0"


class HarnessError(Exception):
    """Base class for harness errors."""


class LoadError(HarnessError):
    """Artifact file missing, malformed, or version-mismatched."""
