"""Offline index building plus the read-only HTTP recommendation service."""

from .bundle import (
    FORMAT_VERSION,
    IndexBundle,
    TagEntry,
    WorkbookMeta,
    load_bundle,
)
from .builder import build_index
from .http import create_app, serve

__all__ = [
    "FORMAT_VERSION",
    "IndexBundle",
    "TagEntry",
    "WorkbookMeta",
    "load_bundle",
    "build_index",
    "create_app",
    "serve",
]
