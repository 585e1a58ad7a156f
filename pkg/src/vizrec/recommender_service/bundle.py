"""Serve-ready index bundle: on-disk layout, loading, and query operations.

A bundle is a directory of versioned files: workbook metadata and per-profile
token documents as line-delimited JSON (diff-able), fitted models in the
binary container, precomputed per-facet neighbor lists, near-duplicate
groups, the tag table, an inverted token index, and a manifest carrying the
format version, build config, and SHA-256 checksums of every data file.
Bundles are immutable once written; rebuilding from the same inputs and seed
reproduces them byte for byte (nothing time- or environment-dependent is
stored).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import BundleFormatError, UnknownFacet, UnknownWorkbook
from ..models import TfIdfModel, tfidf_matrix, tfidf_vector
from ..models.lda import LdaModel, load_lda, save_lda
from ..models.tfidf import load_tfidf, save_tfidf
from ..similarity import DuplicateGroup, Facet, FacetConfig, NeighborList
from ..text_pipeline import (
    ALL_TEXT,
    COLUMNS_ONLY,
    Document,
    StopWordList,
    extract_tokens,
)

FORMAT_VERSION = 1
DEFAULT_PAGE_LIMIT = 24
MAX_PAGE_LIMIT = 100
TAG_COUNT = 30
SIDEBAR_RECOMMENDATIONS = 5

_PROFILE_KEYS = {"all_text": ALL_TEXT, "columns_only": COLUMNS_ONLY}


@dataclass(frozen=True)
class WorkbookMeta:
    workbook_id: str
    title: str
    author: str
    modified_date: str
    language: str
    sheets: tuple  # ((sheet_name, kind), ...)
    columns: tuple  # column captions across datasources
    word_count: int  # full-text token count after preprocessing
    eligible: bool
    exclusion_reasons: tuple  # empty when eligible

    def to_json(self) -> dict:
        return {
            "id": self.workbook_id,
            "title": self.title,
            "author": self.author,
            "modified_date": self.modified_date,
            "language": self.language,
            "sheets": [{"name": n, "kind": k} for n, k in self.sheets],
            "columns": list(self.columns),
            "word_count": self.word_count,
            "eligible": self.eligible,
            "exclusion_reasons": list(self.exclusion_reasons),
        }

    @classmethod
    def from_json(cls, row: dict) -> "WorkbookMeta":
        return cls(
            workbook_id=row["id"],
            title=row["title"],
            author=row["author"],
            modified_date=row["modified_date"],
            language=row["language"],
            sheets=tuple((s["name"], s["kind"]) for s in row["sheets"]),
            columns=tuple(row["columns"]),
            word_count=row["word_count"],
            eligible=row["eligible"],
            exclusion_reasons=tuple(row["exclusion_reasons"]),
        )

    def card_json(self) -> dict:
        """The compact form used in lists and recommendation strips."""
        return {
            "id": self.workbook_id,
            "title": self.title,
            "author": self.author,
            "modified_date": self.modified_date,
        }


@dataclass(frozen=True)
class TagEntry:
    tag: str
    weight: float
    workbook_ids: tuple

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "weight": self.weight,
            "workbook_ids": list(self.workbook_ids),
        }


def _facet_file_key(facet: Facet) -> str:
    return facet.value.replace("-", "_")


@dataclass
class IndexBundle:
    manifest: dict
    workbooks: dict  # id -> WorkbookMeta, iterated in sorted-id order
    documents: dict  # profile key -> {id: Document}
    tfidf: TfIdfModel
    lda_models: dict  # profile key -> LdaModel
    facet_configs: dict  # Facet -> FacetConfig
    neighbors: dict  # Facet -> {id: NeighborList}
    groups: list  # DuplicateGroup
    tags: list  # TagEntry, descending weight
    inverted: dict  # token -> tuple of workbook ids
    stop_words: StopWordList
    _group_by_member: dict = field(default_factory=dict, repr=False)
    _search_rows: object = field(default=None, repr=False)
    _search_ids: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        for group in self.groups:
            for member in group.members:
                self._group_by_member[member] = group

    # -- accessors ---------------------------------------------------------

    @property
    def workbook_ids(self) -> list[str]:
        return sorted(self.workbooks)

    def meta(self, workbook_id: str) -> WorkbookMeta:
        try:
            return self.workbooks[workbook_id]
        except KeyError:
            raise UnknownWorkbook(f"unknown workbook id {workbook_id!r}") from None

    def page(self, offset: int = 0, limit: int = DEFAULT_PAGE_LIMIT) -> dict:
        limit = max(1, min(int(limit), MAX_PAGE_LIMIT))
        offset = max(0, int(offset))
        ids = self.workbook_ids
        return {
            "total": len(ids),
            "offset": offset,
            "limit": limit,
            "items": [self.workbooks[i].card_json() for i in ids[offset : offset + limit]],
        }

    def recommend(
        self,
        workbook_id: str,
        facet: Facet | str,
        limit: int = DEFAULT_PAGE_LIMIT,
        offset: int = 0,
    ) -> dict:
        """Page of the precomputed neighbor list for one facet."""
        if isinstance(facet, str):
            try:
                facet = Facet.parse(facet)
            except KeyError:
                raise UnknownFacet(f"unknown facet {facet!r}") from None
        meta = self.meta(workbook_id)
        limit = max(1, min(int(limit), MAX_PAGE_LIMIT))
        offset = max(0, int(offset))
        listing = self.neighbors[facet].get(workbook_id)
        pairs = listing.neighbors if listing is not None else ()
        items = [
            {
                "workbook": self.workbooks[nid].card_json(),
                "score": value,
            }
            for nid, value in pairs[offset : offset + limit]
        ]
        return {
            "id": meta.workbook_id,
            "facet": facet.value,
            "total": len(pairs),
            "offset": offset,
            "limit": limit,
            "items": items,
        }

    def group_of(self, workbook_id: str) -> dict | None:
        self.meta(workbook_id)
        group = self._group_by_member.get(workbook_id)
        if group is None:
            return None
        return {
            "group_id": group.group_id,
            "representative_id": group.representative_id,
            "members": [self.workbooks[m].card_json() for m in group.members],
        }

    def detail(self, workbook_id: str) -> dict:
        """Quick-view payload: metadata plus the head of every facet list."""
        meta = self.meta(workbook_id)
        recommendations = {
            facet.value: self.recommend(
                workbook_id, facet, limit=SIDEBAR_RECOMMENDATIONS
            )["items"]
            for facet in Facet
        }
        return {
            "workbook": meta.to_json(),
            "recommendations": recommendations,
            "group": self.group_of(workbook_id),
        }

    def tag_table(self) -> list[dict]:
        return [t.to_json() for t in self.tags]

    def tag_workbooks(self, tag: str) -> list[dict]:
        """Workbooks whose full-text document contains the tag token."""
        ids = self.inverted.get(tag, ())
        return [self.workbooks[i].card_json() for i in ids]

    # -- search --------------------------------------------------------------

    def _ensure_search_rows(self):
        if self._search_rows is None:
            docs = self.documents["all_text"]
            self._search_ids = sorted(docs)
            self._search_rows = tfidf_matrix(
                self.tfidf, [docs[i] for i in self._search_ids]
            )

    def search(self, query: str, limit: int = DEFAULT_PAGE_LIMIT) -> list[dict]:
        """Author exact-prefix matches first, then TF-IDF cosine ranking."""
        limit = max(1, min(int(limit), MAX_PAGE_LIMIT))
        needle = query.strip().lower()
        results: list[dict] = []
        listed: set = set()
        if needle:
            author_hits = [
                meta
                for meta in (self.workbooks[i] for i in self.workbook_ids)
                if meta.author.lower().startswith(needle)
            ]
            author_hits.sort(key=lambda m: (m.author.lower(), m.workbook_id))
            for meta in author_hits:
                results.append(
                    {"workbook": meta.card_json(), "score": 1.0, "match": "author"}
                )
                listed.add(meta.workbook_id)

        counts: dict = {}
        for token in extract_tokens(query, self.stop_words):
            counts[token] = counts.get(token, 0) + 1
        if counts:
            pseudo = Document(
                workbook_id="#query",
                profile=ALL_TEXT,
                counts=counts,
                total_tokens=sum(counts.values()),
                unique_tokens=len(counts),
            )
            vec = tfidf_vector(self.tfidf, pseudo)
            if vec.nnz:
                self._ensure_search_rows()
                scores = self._search_rows[:, vec.indices] @ vec.values
                scores = np.asarray(scores).ravel()
                order = sorted(
                    (i for i in range(len(self._search_ids)) if scores[i] > 0.0),
                    key=lambda i: (-scores[i], self._search_ids[i]),
                )
                for i in order:
                    wid = self._search_ids[i]
                    if wid in listed:
                        continue
                    results.append(
                        {
                            "workbook": self.workbooks[wid].card_json(),
                            "score": float(min(1.0, scores[i])),
                            "match": "text",
                        }
                    )
        return results[:limit]


# ---------------------------------------------------------------------------
# persistence


def _dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _doc_to_json(doc: Document) -> dict:
    return {
        "id": doc.workbook_id,
        "counts": dict(sorted(doc.counts.items())),
        "total_tokens": doc.total_tokens,
        "unique_tokens": doc.unique_tokens,
    }


def _doc_from_json(row: dict, profile_key: str) -> Document:
    return Document(
        workbook_id=row["id"],
        profile=_PROFILE_KEYS[profile_key],
        counts=row["counts"],
        total_tokens=row["total_tokens"],
        unique_tokens=row["unique_tokens"],
    )


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def save_bundle(bundle: IndexBundle, path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    (root / "models").mkdir(exist_ok=True)
    files: list[Path] = []

    def write_text(name: str, text: str):
        target = root / name
        target.write_text(text, encoding="utf-8")
        files.append(target)

    write_text(
        "workbooks.jsonl",
        "".join(
            _dumps(bundle.workbooks[i].to_json()) + "\n" for i in bundle.workbook_ids
        ),
    )
    for profile_key, docs in sorted(bundle.documents.items()):
        write_text(
            f"documents_{profile_key}.jsonl",
            "".join(_dumps(_doc_to_json(docs[i])) + "\n" for i in sorted(docs)),
        )
    save_tfidf(bundle.tfidf, root / "models" / "tfidf.bin")
    files.append(root / "models" / "tfidf.bin")
    for profile_key, model in sorted(bundle.lda_models.items()):
        save_lda(model, root / "models" / f"lda_{profile_key}.bin")
        files.append(root / "models" / f"lda_{profile_key}.bin")
    for facet in Facet:
        listings = bundle.neighbors.get(facet, {})
        write_text(
            f"neighbors_{_facet_file_key(facet)}.jsonl",
            "".join(
                _dumps(
                    {
                        "id": wid,
                        "neighbors": [[n, v] for n, v in listings[wid].neighbors],
                    }
                )
                + "\n"
                for wid in sorted(listings)
            ),
        )
    write_text(
        "groups.jsonl",
        "".join(
            _dumps(
                {
                    "group_id": g.group_id,
                    "members": list(g.members),
                    "representative_id": g.representative_id,
                }
            )
            + "\n"
            for g in bundle.groups
        ),
    )
    write_text("tags.json", _dumps([t.to_json() for t in bundle.tags]) + "\n")
    write_text(
        "inverted_index.json",
        _dumps({tok: list(ids) for tok, ids in sorted(bundle.inverted.items())}) + "\n",
    )
    write_text(
        "stopwords.txt",
        "".join(line + "\n" for line in sorted(bundle.stop_words.entries)),
    )

    manifest = dict(bundle.manifest)
    manifest["format_version"] = FORMAT_VERSION
    manifest["facets"] = {
        facet.value: {
            "low": cfg.low,
            "high": cfg.high,
            "profile": cfg.profile.kind,
        }
        for facet, cfg in sorted(
            bundle.facet_configs.items(), key=lambda kv: kv[0].value
        )
    }
    manifest["checksums"] = {
        str(f.relative_to(root).as_posix()): _sha256(f) for f in sorted(files)
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line]


def load_bundle(path) -> IndexBundle:
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise BundleFormatError(f"not an index bundle (no manifest.json): {root}")
    manifest = json.loads(manifest_path.read_text("utf-8"))
    if manifest.get("format_version") != FORMAT_VERSION:
        raise BundleFormatError(
            f"unsupported bundle format_version {manifest.get('format_version')!r}"
        )
    for rel, expected in manifest.get("checksums", {}).items():
        target = root / rel
        if not target.is_file():
            raise BundleFormatError(f"bundle file missing: {rel}")
        actual = _sha256(target)
        if actual != expected:
            raise BundleFormatError(
                f"bundle file corrupted: {rel} (checksum mismatch)"
            )

    workbooks = {
        row["id"]: WorkbookMeta.from_json(row)
        for row in _read_jsonl(root / "workbooks.jsonl")
    }
    documents = {}
    for profile_key in _PROFILE_KEYS:
        doc_path = root / f"documents_{profile_key}.jsonl"
        documents[profile_key] = {
            row["id"]: _doc_from_json(row, profile_key)
            for row in _read_jsonl(doc_path)
        }
    tfidf = load_tfidf(root / "models" / "tfidf.bin")
    lda_models = {}
    for profile_key in _PROFILE_KEYS:
        model_path = root / "models" / f"lda_{profile_key}.bin"
        if model_path.is_file():
            lda_models[profile_key] = load_lda(model_path)

    facet_configs = {}
    for facet_value, cfg in manifest["facets"].items():
        facet = Facet.parse(facet_value)
        profile = _PROFILE_KEYS[cfg["profile"]]
        facet_configs[facet] = FacetConfig(
            facet=facet, low=cfg["low"], high=cfg["high"], profile=profile
        )

    neighbors = {}
    for facet in Facet:
        rows = _read_jsonl(root / f"neighbors_{_facet_file_key(facet)}.jsonl")
        neighbors[facet] = {
            row["id"]: NeighborList(
                workbook_id=row["id"],
                facet=facet,
                neighbors=tuple((n, v) for n, v in row["neighbors"]),
            )
            for row in rows
        }
    groups = [
        DuplicateGroup(
            group_id=row["group_id"],
            members=tuple(row["members"]),
            representative_id=row["representative_id"],
        )
        for row in _read_jsonl(root / "groups.jsonl")
    ]
    tags = [
        TagEntry(tag=row["tag"], weight=row["weight"], workbook_ids=tuple(row["workbook_ids"]))
        for row in json.loads((root / "tags.json").read_text("utf-8"))
    ]
    inverted = {
        tok: tuple(ids)
        for tok, ids in json.loads(
            (root / "inverted_index.json").read_text("utf-8")
        ).items()
    }
    stops = StopWordList.from_path(root / "stopwords.txt")

    return IndexBundle(
        manifest=manifest,
        workbooks=workbooks,
        documents=documents,
        tfidf=tfidf,
        lda_models=lda_models,
        facet_configs=facet_configs,
        neighbors=neighbors,
        groups=groups,
        tags=tags,
        inverted=inverted,
        stop_words=stops,
    )
