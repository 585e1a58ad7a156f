"""Pretrained word vectors and count-weighted document embeddings.

The vector file format is the common whitespace-separated text layout: one
token per line followed by its components. A document embedding is the mean
of its tokens' vectors weighted by token counts; tokens absent from the table
are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DimensionMismatch, IoError, NoKnownTokens
from ..text_pipeline import Document
from . import container


@dataclass(frozen=True)
class WordVectorTable:
    dimension: int
    vectors: dict  # token -> np.ndarray (dimension,)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def get(self, token: str):
        return self.vectors.get(token)


def load_word_vectors(path) -> WordVectorTable:
    """Parse a text vector file; duplicate tokens keep the last entry."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read word vectors: {path}: {exc}") from exc
    vectors: dict = {}
    dimension = None
    for lineno, line in enumerate(raw.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        token, comps = parts[0], parts[1:]
        if dimension is None:
            dimension = len(comps)
            if dimension == 0:
                raise DimensionMismatch(
                    f"{path}:{lineno}: no vector components for {token!r}"
                )
        elif len(comps) != dimension:
            raise DimensionMismatch(
                f"{path}:{lineno}: expected {dimension} components, got {len(comps)}"
            )
        try:
            vectors[token] = np.array([float(c) for c in comps], dtype=np.float64)
        except ValueError as exc:
            raise DimensionMismatch(f"{path}:{lineno}: non-numeric component") from exc
    if not vectors:
        raise IoError(f"word vector file has no entries: {path}")
    return WordVectorTable(dimension=dimension, vectors=vectors)


def embed_document(table: WordVectorTable, doc: Document) -> np.ndarray:
    """Count-weighted mean vector over the tokens present in the table."""
    acc = np.zeros(table.dimension, dtype=np.float64)
    weight = 0
    for token, count in doc.counts.items():
        vec = table.vectors.get(token)
        if vec is not None:
            acc += count * vec
            weight += count
    if weight == 0:
        raise NoKnownTokens(
            f"no tokens of {doc.workbook_id} appear in the vector table"
        )
    return acc / weight


def save_word_vectors(table: WordVectorTable, path) -> None:
    tokens = sorted(table.vectors)
    matrix = np.stack([table.vectors[t] for t in tokens]) if tokens else np.empty((0, 0))
    container.write_container(
        path,
        {
            "tokens": container.json_section(tokens),
            "matrix": matrix,
            "meta": container.json_section({"dimension": table.dimension}),
        },
        kind="wordvec",
    )


def load_word_vector_container(path) -> WordVectorTable:
    sections = container.read_container(path, kind="wordvec")
    tokens = container.json_value(sections["tokens"])
    matrix = sections["matrix"]
    meta = container.json_value(sections["meta"])
    return WordVectorTable(
        dimension=int(meta["dimension"]),
        vectors={t: matrix[i] for i, t in enumerate(tokens)},
    )
