"""Versioned binary container for model artifacts.

Layout (all integers little-endian):

    magic      8 bytes  b"VIZRECMD"
    version    u32
    kind       u16 length + utf-8 string (which model the file holds)
    n_sections u32
    section*   u16 name length + name, u8 dtype tag, u8 ndim,
               ndim x u64 dims, u64 payload length, payload bytes

Array payloads are C-order little-endian; floats are IEEE-754 doubles.
Sections are written in sorted name order so containers are byte-reproducible.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import BundleFormatError

MAGIC = b"VIZRECMD"
VERSION = 1

_DTYPE_TAGS = {0: "<f8", 1: "<i8", 2: "<u8"}
_TAG_FOR_KIND = {np.dtype(np.float64): 0, np.dtype(np.int64): 1, np.dtype(np.uint64): 2}
_JSON_TAG = 3


class _JsonSection:
    def __init__(self, value):
        self.value = value


def json_section(value) -> _JsonSection:
    """Wrap a JSON-serializable value for storage as a container section."""
    return _JsonSection(value)


def json_value(section):
    """Unwrap a JSON section read back from a container."""
    if isinstance(section, _JsonSection):
        return section.value
    raise BundleFormatError("section is not JSON-typed")


def write_container(path, sections: dict, kind: str = "") -> None:
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<I", VERSION)
    kind_b = kind.encode("utf-8")
    buf += struct.pack("<H", len(kind_b)) + kind_b
    buf += struct.pack("<I", len(sections))
    for name in sorted(sections):
        value = sections[name]
        name_b = name.encode("utf-8")
        buf += struct.pack("<H", len(name_b)) + name_b
        if isinstance(value, _JsonSection):
            payload = json.dumps(
                value.value, sort_keys=True, separators=(",", ":")
            ).encode("utf-8")
            buf += struct.pack("<BB", _JSON_TAG, 0)
            buf += struct.pack("<Q", len(payload)) + payload
        else:
            arr = np.asarray(value)
            if arr.dtype not in _TAG_FOR_KIND:
                arr = arr.astype(np.float64)
            tag = _TAG_FOR_KIND[arr.dtype]
            arr = np.ascontiguousarray(arr)
            buf += struct.pack("<BB", tag, arr.ndim)
            for dim in arr.shape:
                buf += struct.pack("<Q", dim)
            payload = arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes()
            buf += struct.pack("<Q", len(payload)) + payload
    Path(path).write_bytes(bytes(buf))


def read_container(path, kind: str | None = None) -> dict:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise BundleFormatError(f"cannot read container {path}: {exc}") from exc
    view = memoryview(raw)
    off = 0

    def take(n):
        nonlocal off
        if off + n > len(raw):
            raise BundleFormatError(f"truncated container: {path}")
        chunk = view[off : off + n]
        off += n
        return chunk

    if bytes(take(8)) != MAGIC:
        raise BundleFormatError(f"bad magic header: {path}")
    (version,) = struct.unpack("<I", take(4))
    if version != VERSION:
        raise BundleFormatError(f"unsupported container version {version}: {path}")
    (kind_len,) = struct.unpack("<H", take(2))
    file_kind = bytes(take(kind_len)).decode("utf-8")
    if kind is not None and file_kind != kind:
        raise BundleFormatError(f"expected {kind!r} container, found {file_kind!r}")
    (n_sections,) = struct.unpack("<I", take(4))
    sections: dict = {}
    for _ in range(n_sections):
        (name_len,) = struct.unpack("<H", take(2))
        name = bytes(take(name_len)).decode("utf-8")
        tag, ndim = struct.unpack("<BB", take(2))
        dims = [struct.unpack("<Q", take(8))[0] for _ in range(ndim)]
        (payload_len,) = struct.unpack("<Q", take(8))
        payload = take(payload_len)
        if tag == _JSON_TAG:
            sections[name] = _JsonSection(json.loads(bytes(payload).decode("utf-8")))
        elif tag in _DTYPE_TAGS:
            arr = np.frombuffer(payload, dtype=_DTYPE_TAGS[tag]).reshape(dims)
            sections[name] = arr.astype(arr.dtype.newbyteorder("="))
        else:
            raise BundleFormatError(f"unknown section dtype tag {tag}: {path}")
    return sections
