"""Parse workbook specification files into structured text records.

Workbook specs are XML documents bundling views, dashboards, and data-source
references. Extraction follows an explicit element-path whitelist so that the
output is bit-reproducible across vendor schema variations; anything outside
the whitelist is ignored silently.

Whitelisted paths (relative to the ``<workbook>`` root):

========================================  =======================================
path                                      captured as
========================================  =======================================
workbook/@name                            workbook title
workbook/@author                          author (optional)
workbook/@modified-date                   ISO-8601 modification date (optional)
worksheets/worksheet/@name                sheet name (field class ``sheet_name``)
worksheet/title//run (or text)            one ``title`` field per title element
worksheet/caption//run (or text)          one ``caption`` field per caption
worksheet//axis/@caption                  one ``axis_label`` field per axis
worksheet//annotation (runs or text)      one ``annotation`` field per annotation
worksheet//mark, worksheet//encoding      mark presence (``has_marks``)
dashboards/dashboard/@name                dashboard sheet name
dashboard/title, dashboard/caption        dashboard's own title/caption fields
dashboard//zone/@worksheet                referenced sheet names (no text copied)
datasources/datasource/@caption|@name     datasource name
datasource//column/@caption|@name         column caption (brackets stripped)
========================================  =======================================

A JSON mirror of the same record structure is accepted alongside XML so that
non-Tableau repositories with similar textual features can be loaded.
"""

from __future__ import annotations

import hashlib
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IoError, MalformedXml, UnsupportedSchema

FIELD_CLASSES = ("sheet_name", "title", "caption", "axis_label", "annotation")

# Compact function-word set for the naive language heuristic. One hit in the
# raw token stream marks a workbook "en"; zero hits marks it "und" and the
# workbook is excluded from model training.
_EN_FUNCTION_WORDS = frozenset(
    """a an and are as at be but by for from has have in is it its of on or
    per that the this to was were which with""".split()
)

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


@dataclass(frozen=True)
class SheetRecord:
    """One view or dashboard with its classified text fields."""

    sheet_name: str
    kind: str  # "view" or "dashboard"
    text_fields: tuple[tuple[str, str], ...]
    has_marks: bool
    referenced_sheets: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("view", "dashboard"):
            raise ValueError(f"unknown sheet kind: {self.kind!r}")
        if self.kind == "view" and self.referenced_sheets:
            raise ValueError("views must not carry sheet references")
        for cls, _ in self.text_fields:
            if cls not in FIELD_CLASSES:
                raise ValueError(f"unknown field class: {cls!r}")


@dataclass(frozen=True)
class DataSourceRecord:
    """A datasource and its column captions."""

    datasource_name: str
    column_captions: tuple[str, ...]


@dataclass(frozen=True)
class RawWorkbook:
    """Parsed workbook spec with classified text fields and column names."""

    id: str
    title: str
    author: str
    modified_date: str
    sheets: tuple[SheetRecord, ...]
    datasources: tuple[DataSourceRecord, ...]
    language_tag: str

    def sheet(self, name: str) -> SheetRecord | None:
        for s in self.sheets:
            if s.sheet_name == name:
                return s
        return None


@dataclass
class LoadError:
    path: str
    error: str
    message: str


@dataclass
class LoadResult:
    workbooks: list[RawWorkbook] = field(default_factory=list)
    errors: list[LoadError] = field(default_factory=list)


def _runs_text(elem: ET.Element) -> str:
    """Join the text of all <run> descendants, falling back to element text."""
    parts = [r.text.strip() for r in elem.iter("run") if r.text and r.text.strip()]
    if parts:
        return " ".join(parts)
    return (elem.text or "").strip()


def _strip_brackets(name: str) -> str:
    name = name.strip()
    if name.startswith("[") and name.endswith("]") and len(name) > 2:
        return name[1:-1]
    return name


def detect_marks(sheet_elem: ET.Element) -> bool:
    """True iff the sheet subtree declares at least one mark/encoding element."""
    for tag in ("mark", "encoding"):
        if sheet_elem.find(f".//{tag}") is not None:
            return True
    return False


def _parse_view(ws: ET.Element) -> SheetRecord | None:
    name = (ws.get("name") or "").strip()
    if not name:
        return None
    parents = _parent_map(ws)
    fields: list[tuple[str, str]] = [("sheet_name", name)]
    for title in ws.iter("title"):
        # titles nested under an axis belong to axis/@caption, not here
        text = _runs_text(title)
        if text and not _is_under(parents, title, "axis"):
            fields.append(("title", text))
    for caption in ws.iter("caption"):
        text = _runs_text(caption)
        if text and not _is_under(parents, caption, "axis"):
            fields.append(("caption", text))
    for axis in ws.iter("axis"):
        cap = (axis.get("caption") or "").strip()
        if cap:
            fields.append(("axis_label", cap))
    for ann in ws.iter("annotation"):
        text = _runs_text(ann)
        if text:
            fields.append(("annotation", text))
    return SheetRecord(
        sheet_name=name,
        kind="view",
        text_fields=tuple(fields),
        has_marks=detect_marks(ws),
    )


def _parent_map(root: ET.Element) -> dict[ET.Element, ET.Element]:
    return {child: parent for parent in root.iter() for child in parent}


def _is_under(parents: dict, node: ET.Element, ancestor_tag: str) -> bool:
    cur = node
    while cur in parents:
        cur = parents[cur]
        if cur.tag == ancestor_tag:
            return True
    return False


def _parse_dashboard(db: ET.Element) -> SheetRecord | None:
    name = (db.get("name") or "").strip()
    if not name:
        return None
    fields: list[tuple[str, str]] = [("sheet_name", name)]
    for title in db.iter("title"):
        text = _runs_text(title)
        if text:
            fields.append(("title", text))
    for caption in db.iter("caption"):
        text = _runs_text(caption)
        if text:
            fields.append(("caption", text))
    refs: list[str] = []
    for zone in db.iter("zone"):
        ref = (zone.get("worksheet") or "").strip()
        if ref and ref not in refs:
            refs.append(ref)
    return SheetRecord(
        sheet_name=name,
        kind="dashboard",
        text_fields=tuple(fields),
        has_marks=detect_marks(db),
        referenced_sheets=tuple(refs),
    )


def _parse_datasource(ds: ET.Element) -> DataSourceRecord:
    name = (ds.get("caption") or ds.get("name") or "").strip()
    captions = []
    for col in ds.iter("column"):
        cap = (col.get("caption") or "").strip()
        if not cap:
            cap = _strip_brackets(col.get("name") or "")
        if cap:
            captions.append(cap)
    return DataSourceRecord(datasource_name=name, column_captions=tuple(captions))


def all_text_strings(wb: RawWorkbook) -> list[str]:
    """Every extracted string of a workbook: title, sheet fields, column captions.

    Dashboards contribute only their own fields; text of referenced views is
    counted once at workbook level no matter how many dashboards point to it.
    """
    out = []
    if wb.title:
        out.append(wb.title)
    for sheet in wb.sheets:
        out.extend(text for _, text in sheet.text_fields)
    for ds in wb.datasources:
        out.extend(ds.column_captions)
    return out


def detect_language(strings: list[str]) -> str:
    """Naive stop-word-hit heuristic: "en" on any function-word hit, else "und"."""
    for s in strings:
        for token in _WORD_RE.findall(s.lower()):
            if token in _EN_FUNCTION_WORDS:
                return "en"
    return "und"


def parse_workbook(xml_bytes: bytes, id: str) -> RawWorkbook:
    """Parse one XML workbook spec into a RawWorkbook.

    Raises MalformedXml on unparseable input and UnsupportedSchema when the
    root element is not <workbook>.
    """
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    if root.tag != "workbook":
        raise UnsupportedSchema(f"root element {root.tag!r} is not 'workbook'")

    sheets: list[SheetRecord] = []
    worksheets = root.find("worksheets")
    if worksheets is not None:
        for ws in worksheets.findall("worksheet"):
            rec = _parse_view(ws)
            if rec is not None:
                sheets.append(rec)
    dashboards = root.find("dashboards")
    if dashboards is not None:
        for db in dashboards.findall("dashboard"):
            rec = _parse_dashboard(db)
            if rec is not None:
                sheets.append(rec)

    datasources: list[DataSourceRecord] = []
    ds_container = root.find("datasources")
    if ds_container is not None:
        datasources = [_parse_datasource(ds) for ds in ds_container.findall("datasource")]

    wb = RawWorkbook(
        id=id,
        title=(root.get("name") or "").strip(),
        author=(root.get("author") or "").strip(),
        modified_date=(root.get("modified-date") or "").strip(),
        sheets=tuple(sheets),
        datasources=tuple(datasources),
        language_tag="und",
    )
    return RawWorkbook(
        **{**wb.__dict__, "language_tag": detect_language(all_text_strings(wb))}
    )


def parse_workbook_json(data: bytes | str | dict, id: str) -> RawWorkbook:
    """Parse the JSON mirror of a RawWorkbook.

    The mirror uses the same field names as RawWorkbook; ``language_tag`` is
    honored when present and detected heuristically otherwise.
    """
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedXml(f"invalid JSON mirror: {exc}") from exc
    if not isinstance(data, dict):
        raise UnsupportedSchema("JSON mirror must be an object")
    sheets = []
    for s in data.get("sheets", ()):
        sheets.append(
            SheetRecord(
                sheet_name=s["sheet_name"],
                kind=s.get("kind", "view"),
                text_fields=tuple((c, t) for c, t in s.get("text_fields", ())),
                has_marks=bool(s.get("has_marks", False)),
                referenced_sheets=tuple(s.get("referenced_sheets", ())),
            )
        )
    datasources = [
        DataSourceRecord(
            datasource_name=d.get("datasource_name", ""),
            column_captions=tuple(d.get("column_captions", ())),
        )
        for d in data.get("datasources", ())
    ]
    wb = RawWorkbook(
        id=id,
        title=data.get("title", ""),
        author=data.get("author", ""),
        modified_date=data.get("modified_date", ""),
        sheets=tuple(sheets),
        datasources=tuple(datasources),
        language_tag=data.get("language_tag", ""),
    )
    if not wb.language_tag:
        wb = RawWorkbook(
            **{**wb.__dict__, "language_tag": detect_language(all_text_strings(wb))}
        )
    return wb


def workbook_id_for_path(relpath: str) -> str:
    """Stable opaque id derived from the repository-relative path."""
    return hashlib.sha1(relpath.encode("utf-8")).hexdigest()[:12]


def has_any_marks(wb: RawWorkbook) -> bool:
    return any(s.has_marks for s in wb.sheets)


def load_repository(root_path: str | Path) -> LoadResult:
    """Load every .twb/.xml/.json file under a repository root.

    Files are visited in lexicographic order of their repo-relative path;
    per-file parse failures land in the error report instead of aborting.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise IoError(f"repository root not readable: {root}")
    result = LoadResult()
    seen_ids: set[str] = set()
    paths = sorted(
        (p for p in root.rglob("*") if p.suffix.lower() in (".twb", ".xml", ".json")),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    for path in paths:
        rel = path.relative_to(root).as_posix()
        wb_id = workbook_id_for_path(rel)
        try:
            raw = path.read_bytes()
            if path.suffix.lower() == ".json":
                wb = parse_workbook_json(raw, wb_id)
            else:
                wb = parse_workbook(raw, wb_id)
        except (MalformedXml, UnsupportedSchema, OSError, KeyError, ValueError) as exc:
            result.errors.append(LoadError(rel, type(exc).__name__, str(exc)))
            continue
        if wb.id in seen_ids:
            result.errors.append(LoadError(rel, "DuplicateId", wb.id))
            continue
        seen_ids.add(wb.id)
        result.workbooks.append(wb)
    return result
