"""Turn a parsed workbook into a normalized bag-of-words document.

The pipeline is: select raw strings per feature profile, remove phrase-level
stop entries from the raw text, tokenize, normalize each token with a
rule-based English suffix normalizer, drop stop tokens, and count. Documents
are strictly bags; token order is never preserved.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import IoError, UnknownSheet
from .spec_ingest import RawWorkbook

MIN_TOKEN_LEN = 3
MIN_RELEVANT_TOKENS = 10


def tokenize(raw: str) -> list[str]:
    """Split on non-alphabetic characters, lowercase, drop tokens under 3 chars.

    Alphabetic means ``str.isalpha``: digits of every script, superscripts,
    punctuation, and underscores all act as separators.
    """
    tokens: list[str] = []
    run: list[str] = []
    for ch in raw:
        if ch.isalpha():
            run.append(ch)
        elif run:
            if len(run) >= MIN_TOKEN_LEN:
                tokens.append("".join(run).lower())
            run.clear()
    if len(run) >= MIN_TOKEN_LEN:
        tokens.append("".join(run).lower())
    return tokens


def _strip_suffix(token: str) -> str | None:
    """One rule application; None when no rule fires."""
    n = len(token)
    if n < 4:
        return None
    if token.endswith("eed"):
        return None  # speed, need, agreed: left alone
    if token.endswith("ies") and n >= 5:
        return token[:-3] + "y"
    if token.endswith("sses") and n >= 5:
        return token[:-2]
    if token.endswith(("ches", "shes")):
        return token[:-2]
    if token.endswith("es") and token[-3] in "xzs" and n >= 5:
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    if token.endswith("ing") and n >= 6:
        return _undouble(token[:-3])
    if token.endswith("ed") and n >= 5:
        return _undouble(token[:-2])
    return None


def _undouble(stem: str) -> str:
    # plann -> plan, but fall/miss/buzz endings are kept
    if (
        len(stem) >= 4
        and stem[-1] == stem[-2]
        and stem[-1] not in "aeioulsz"
    ):
        return stem[:-1]
    return stem


def normalize_token(token: str) -> str:
    """Rule-based suffix normalization; iterates to a fixed point.

    Approximates dictionary lemmatization for frequency conflation: plural
    -s/-es/-ies and -ing/-ed are stripped with doubling repair. Idempotent by
    construction. Swap in a dictionary lemmatizer by passing a different
    ``normalizer`` to the functions below.
    """
    current = token
    while True:
        nxt = _strip_suffix(current)
        if nxt is None or len(nxt) < MIN_TOKEN_LEN or nxt == current:
            return current
        current = nxt


class StopWordList:
    """Immutable stop list with phrase entries and single-token entries.

    Phrase entries (containing whitespace) are removed case-insensitively from
    raw strings before tokenization; single-token entries are matched exactly
    against normalized tokens.
    """

    def __init__(self, entries: set[str], source_path: str = "<builtin>"):
        entries = {e.strip().lower() for e in entries if e.strip()}
        if not entries:
            raise IoError(f"stop list is empty: {source_path}")
        self.entries = frozenset(entries)
        self.source_path = source_path
        self.phrases = tuple(sorted((e for e in entries if " " in e), key=len, reverse=True))
        singles = {e for e in entries if " " not in e}
        self.tokens = frozenset(singles | {normalize_token(e) for e in singles})
        if self.phrases:
            self._phrase_re = re.compile(
                "|".join(re.escape(p) for p in self.phrases), re.IGNORECASE
            )
        else:
            self._phrase_re = None

    def strip_phrases(self, raw: str) -> str:
        if self._phrase_re is None:
            return raw
        return self._phrase_re.sub(" ", raw)

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_path(cls, path: str | Path) -> "StopWordList":
        """Load a stop list file: UTF-8, one entry per line, '#' comments."""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read stop list {path}: {exc}") from exc
        entries = {
            line.strip().lower()
            for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        }
        return cls(entries, source_path=str(path))


def default_stop_words() -> StopWordList:
    """The shipped default list (~350 generic + BI-boilerplate entries)."""
    text = resources.files("vizrec.data").joinpath("stopwords.txt").read_text("utf-8")
    entries = {
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    }
    return StopWordList(entries, source_path="<builtin>")


@dataclass(frozen=True)
class FeatureProfile:
    """Which workbook text feeds the document.

    all_text: every field class plus column captions. columns_only: column
    captions only. sheet_plus_title: one sheet's fields plus workbook title.
    """

    kind: str
    sheet_name: str | None = None

    def __post_init__(self):
        if self.kind not in ("all_text", "columns_only", "sheet_plus_title"):
            raise ValueError(f"unknown profile kind: {self.kind!r}")
        if self.kind == "sheet_plus_title" and not self.sheet_name:
            raise ValueError("sheet_plus_title profile needs a sheet name")

    @property
    def key(self) -> str:
        if self.kind == "sheet_plus_title":
            return f"sheet_plus_title:{self.sheet_name}"
        return self.kind


ALL_TEXT = FeatureProfile("all_text")
COLUMNS_ONLY = FeatureProfile("columns_only")


def sheet_plus_title(sheet_name: str) -> FeatureProfile:
    return FeatureProfile("sheet_plus_title", sheet_name)


@dataclass(frozen=True)
class Document:
    """Normalized bag-of-words for one workbook under a feature profile."""

    workbook_id: str
    profile: FeatureProfile
    counts: dict[str, int]
    total_tokens: int
    unique_tokens: int

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.counts)


def _profile_strings(wb: RawWorkbook, profile: FeatureProfile) -> list[str]:
    if profile.kind == "columns_only":
        return [cap for ds in wb.datasources for cap in ds.column_captions]
    if profile.kind == "sheet_plus_title":
        sheet = wb.sheet(profile.sheet_name)
        if sheet is None:
            raise UnknownSheet(f"{wb.id}: no sheet named {profile.sheet_name!r}")
        out = [wb.title] if wb.title else []
        out.extend(text for _, text in sheet.text_fields)
        return out
    out = [wb.title] if wb.title else []
    for sheet in wb.sheets:
        out.extend(text for _, text in sheet.text_fields)
    for ds in wb.datasources:
        out.extend(ds.column_captions)
    return out


def extract_tokens(raw: str, stops: StopWordList) -> list[str]:
    """Phrase-strip, tokenize, normalize, and stop-filter one raw string."""
    tokens = []
    for tok in tokenize(stops.strip_phrases(raw)):
        norm = normalize_token(tok)
        if norm not in stops:
            tokens.append(norm)
    return tokens


def build_document(
    wb: RawWorkbook, profile: FeatureProfile, stops: StopWordList
) -> Document:
    """Gather, normalize, and count tokens; multiplicity is preserved."""
    counter: Counter[str] = Counter()
    for raw in _profile_strings(wb, profile):
        counter.update(extract_tokens(raw, stops))
    counts = dict(sorted(counter.items()))
    doc_id = wb.id
    if profile.kind == "sheet_plus_title":
        doc_id = f"{wb.id}#{profile.sheet_name}"
    return Document(
        workbook_id=doc_id,
        profile=profile,
        counts=counts,
        total_tokens=sum(counts.values()),
        unique_tokens=len(counts),
    )


def eligible_for_recommendation(doc: Document) -> bool:
    """Documents with fewer than 10 relevant words are excluded."""
    return doc.total_tokens >= MIN_RELEVANT_TOKENS
