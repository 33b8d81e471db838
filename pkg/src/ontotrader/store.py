"""Two-level document store: metadata documents, meta-metadata records,
and the conjunctive query language with percentage match scoring.

Level-2 (meta) repositories live in processing modules and hold full
metadata documents; level-3 (metameta) repositories live in traders and
hold per-document projections of the indexed fields. Both share the same
Repository type, distinguished by level.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Union

Scalar = Union[str, int, float, bool]
FieldValue = Union[Scalar, list]

# Projection bookkeeping paths reserved on meta-metadata records.
ORIGIN_MODULE = "origin.module"
ORIGIN_AMBIENT = "origin.ambient"
ORIGIN_DOC_ID = "origin.doc_id"


class DocLevel(str, Enum):
    META = "meta"
    METAMETA = "metameta"


class Op(str, Enum):
    EQ = "eq"
    NE = "ne"
    LT = "lt"
    LE = "le"
    GT = "gt"
    GE = "ge"
    CONTAINS = "contains"


class StoreError(Exception):
    """Base for store failures."""


class TypeMismatch(StoreError):
    """Condition operator/literal incompatible with the field's type."""


class InvalidQuery(StoreError):
    """Structurally invalid query body (e.g. zero conditions)."""


class DuplicateId(StoreError):
    """Insert with an explicit doc_id that already exists."""


class UnknownId(StoreError):
    """No document under the given doc_id."""


class StorageFault(StoreError):
    """Injected read fault (test hook for upstream QueryError mapping)."""


@dataclass
class Document:
    """A metadata document: ordered map of dot-separated paths to scalars
    or lists of scalars."""

    doc_id: str
    level: DocLevel
    fields: dict[str, FieldValue]


def _is_scalar(value) -> bool:
    return isinstance(value, (str, int, float, bool))


def document_problems(doc: Document) -> list[str]:
    """Structural checks; an empty list means the document is well formed."""
    problems = []
    if not isinstance(doc.doc_id, str):
        problems.append("doc_id must be a string")
    if not isinstance(doc.level, DocLevel):
        problems.append("level must be meta or metameta")
    if not isinstance(doc.fields, dict):
        return problems + ["fields must be a path -> value map"]
    for path, value in doc.fields.items():
        if not isinstance(path, str) or not path:
            problems.append("field paths must be non-empty strings")
        elif _is_scalar(value):
            continue
        elif isinstance(value, list):
            if not all(_is_scalar(el) for el in value):
                problems.append(f"list field {path} must contain only scalars")
        else:
            problems.append(f"field {path} must be a scalar or list of scalars")
    return problems


@dataclass(frozen=True)
class Condition:
    path: str
    op: Op
    literal: Scalar


@dataclass
class QueryBody:
    conditions: list[Condition]
    projection: list[str] | None = None
    order_by: tuple[str, str] | None = None  # (path, "asc"|"desc")


@dataclass(frozen=True)
class MatchResult:
    doc_id: str
    percentage: int


@dataclass(frozen=True)
class EffectivePolicies:
    """Normalized search policies: a result cap and the exact-match flag."""

    cardinality: int
    exact: bool


# ---------------------------------------------------------------------------
# Condition evaluation and scoring
# ---------------------------------------------------------------------------

def _scalars_equal(value: Scalar, literal: Scalar) -> bool:
    # bool is an int subclass; keep True distinct from 1.
    if isinstance(value, bool) != isinstance(literal, bool):
        return False
    return value == literal


def _scalar_contains(value: Scalar, literal: Scalar, path: str) -> bool:
    if isinstance(value, str) and isinstance(literal, str):
        return literal in value
    raise TypeMismatch(f"contains at {path} needs a string field and string literal")


def _ordered(value: Scalar, literal: Scalar, path: str, op: Op) -> bool:
    numeric = (
        isinstance(value, (int, float)) and not isinstance(value, bool)
        and isinstance(literal, (int, float)) and not isinstance(literal, bool)
    )
    textual = isinstance(value, str) and isinstance(literal, str)
    if not (numeric or textual):
        raise TypeMismatch(f"{op.value} at {path} needs two numbers or two strings")
    if op is Op.LT:
        return value < literal
    if op is Op.LE:
        return value <= literal
    if op is Op.GT:
        return value > literal
    return value >= literal


def condition_satisfied(doc: Document, cond: Condition) -> bool:
    """True iff the document satisfies the condition. A missing path is
    unsatisfied, never an error. List fields support eq/contains only,
    satisfied when any element matches."""
    if cond.path not in doc.fields:
        return False
    value = doc.fields[cond.path]
    if isinstance(value, list):
        if cond.op is Op.EQ:
            return any(_scalars_equal(el, cond.literal) for el in value)
        if cond.op is Op.CONTAINS:
            return any(_scalar_contains(el, cond.literal, cond.path) for el in value)
        raise TypeMismatch(f"{cond.op.value} at {cond.path} is not defined for list fields")
    if cond.op is Op.EQ:
        return _scalars_equal(value, cond.literal)
    if cond.op is Op.NE:
        return not _scalars_equal(value, cond.literal)
    if cond.op is Op.CONTAINS:
        return _scalar_contains(value, cond.literal, cond.path)
    return _ordered(value, cond.literal, cond.path, cond.op)


def match_score(doc: Document, q: QueryBody) -> int:
    """Percentage of satisfied conditions, rounded half-up to 0..100."""
    if not q.conditions:
        raise InvalidQuery("query must carry at least one condition")
    satisfied = sum(1 for cond in q.conditions if condition_satisfied(doc, cond))
    total = len(q.conditions)
    return (200 * satisfied + total) // (2 * total)


# ---------------------------------------------------------------------------
# Repository
# ---------------------------------------------------------------------------

class _RWLock:
    """Readers-writer lock: concurrent readers, serialized writers."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False

    def acquire_read(self) -> None:
        with self._cond:
            while self._writing:
                self._cond.wait()
            self._readers += 1

    def release_read(self) -> None:
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self) -> None:
        with self._cond:
            while self._writing or self._readers:
                self._cond.wait()
            self._writing = True

    def release_write(self) -> None:
        with self._cond:
            self._writing = False
            self._cond.notify_all()


class Repository:
    """Keyed document store for one level. Writes are atomic per operation;
    assigned ids are never reused within a run."""

    def __init__(self, level: DocLevel, prefix: str = "doc") -> None:
        self.level = level
        self.prefix = prefix
        self._docs: dict[str, Document] = {}
        self._counter = 0
        self._lock = _RWLock()
        self.inject_read_fault = False  # test hook: fetch raises StorageFault

    def __len__(self) -> int:
        return len(self._docs)

    def insert(self, doc: Document) -> str:
        """Store a document; assigns ``<prefix>-<counter>`` when doc_id is
        empty. Raises DuplicateId if an explicit id already exists."""
        self._check_level(doc)
        self._lock.acquire_write()
        try:
            doc_id = doc.doc_id
            if not doc_id:
                self._counter += 1
                doc_id = f"{self.prefix}-{self._counter}"
                doc = Document(doc_id, doc.level, dict(doc.fields))
            elif doc_id in self._docs:
                raise DuplicateId(doc_id)
            self._docs[doc_id] = doc
            return doc_id
        finally:
            self._lock.release_write()

    def replace(self, doc_id: str, doc: Document) -> None:
        """Replace the document stored under doc_id (the stored key wins
        over the incoming document's own id)."""
        self._check_level(doc)
        self._lock.acquire_write()
        try:
            if doc_id not in self._docs:
                raise UnknownId(doc_id)
            self._docs[doc_id] = Document(doc_id, doc.level, dict(doc.fields))
        finally:
            self._lock.release_write()

    def remove(self, doc_id: str) -> None:
        self._lock.acquire_write()
        try:
            if doc_id not in self._docs:
                raise UnknownId(doc_id)
            del self._docs[doc_id]
        finally:
            self._lock.release_write()

    def fetch(self, doc_id: str) -> Document:
        self._lock.acquire_read()
        try:
            if self.inject_read_fault:
                raise StorageFault(f"injected read fault on {doc_id}")
            if doc_id not in self._docs:
                raise UnknownId(doc_id)
            return self._docs[doc_id]
        finally:
            self._lock.release_read()

    def contains(self, doc_id: str) -> bool:
        self._lock.acquire_read()
        try:
            return doc_id in self._docs
        finally:
            self._lock.release_read()

    def snapshot(self) -> list[Document]:
        self._lock.acquire_read()
        try:
            return list(self._docs.values())
        finally:
            self._lock.release_read()

    def evaluate(self, q: QueryBody, policies: EffectivePolicies) -> list[MatchResult]:
        """Score every document, filter by the exact flag (exact keeps only
        100%, otherwise 0% is dropped), order by percentage desc then doc_id
        asc, truncate to the cardinality."""
        return [m for m, _ in self.evaluate_docs(q, policies)]

    def evaluate_docs(
        self, q: QueryBody, policies: EffectivePolicies
    ) -> list[tuple[MatchResult, Document]]:
        """evaluate() plus the matching documents, under one read section."""
        self._lock.acquire_read()
        try:
            docs = list(self._docs.values())
        finally:
            self._lock.release_read()
        hits = []
        for doc in docs:
            pct = match_score(doc, q)
            if policies.exact:
                if pct == 100:
                    hits.append((MatchResult(doc.doc_id, pct), doc))
            elif pct > 0:
                hits.append((MatchResult(doc.doc_id, pct), doc))
        hits.sort(key=lambda pair: (-pair[0].percentage, pair[0].doc_id))
        return hits[: policies.cardinality]

    def _check_level(self, doc: Document) -> None:
        if doc.level is not self.level:
            raise StoreError(
                f"repository holds {self.level.value} documents, got {doc.level.value}"
            )


# ---------------------------------------------------------------------------
# Projection to meta-metadata records
# ---------------------------------------------------------------------------

@dataclass
class MetaMetaRecord:
    """Trader-level projection of a metadata document: the configured
    indexed fields plus where the document came from."""

    record_id: str
    source_processing_module: str
    ambient: str
    source_doc_id: str
    indexed_fields: dict[str, FieldValue]

    def to_document(self) -> Document:
        fields: dict[str, FieldValue] = dict(self.indexed_fields)
        fields[ORIGIN_MODULE] = self.source_processing_module
        fields[ORIGIN_AMBIENT] = self.ambient
        fields[ORIGIN_DOC_ID] = self.source_doc_id
        return Document(self.record_id, DocLevel.METAMETA, fields)

    @classmethod
    def from_document(cls, doc: Document) -> "MetaMetaRecord":
        indexed = {
            path: value
            for path, value in doc.fields.items()
            if path not in (ORIGIN_MODULE, ORIGIN_AMBIENT, ORIGIN_DOC_ID)
        }
        return cls(
            record_id=doc.doc_id,
            source_processing_module=str(doc.fields.get(ORIGIN_MODULE, "")),
            ambient=str(doc.fields.get(ORIGIN_AMBIENT, "")),
            source_doc_id=str(doc.fields.get(ORIGIN_DOC_ID, "")),
            indexed_fields=indexed,
        )


def project(
    doc: Document,
    indexed_paths: list[str],
    origin: str,
    ambient: str,
) -> MetaMetaRecord:
    """Project a meta document onto the indexed paths. Paths absent from
    the document are silently omitted; record_id is left empty for the
    receiving repository to assign."""
    if doc.level is not DocLevel.META:
        raise StoreError("only meta documents can be projected")
    indexed = {path: doc.fields[path] for path in indexed_paths if path in doc.fields}
    return MetaMetaRecord(
        record_id="",
        source_processing_module=origin,
        ambient=ambient,
        source_doc_id=doc.doc_id,
        indexed_fields=indexed,
    )


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def document_to_json(doc: Document) -> dict:
    return {"doc_id": doc.doc_id, "level": doc.level.value, "fields": doc.fields}


def document_from_json(data: dict) -> Document:
    try:
        doc = Document(data["doc_id"], DocLevel(data["level"]), data["fields"])
    except (KeyError, ValueError, TypeError) as exc:
        raise StoreError(f"bad document record: {exc}") from exc
    problems = document_problems(doc)
    if problems:
        raise StoreError("; ".join(problems))
    return doc


def load_document(path: str | Path) -> Document:
    """Read one document from a JSON file. IO failures raise OSError;
    structural failures raise StoreError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise StoreError(f"{path}: document record must be a JSON object")
    return document_from_json(data)


def dump_document(doc: Document, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(document_to_json(doc), indent=2) + "\n", encoding="utf-8"
    )


def load_seed_dir(directory: str | Path) -> Iterator[Document]:
    """Yield documents from a directory, one JSON file each, in filename
    order for deterministic seeding."""
    for entry in sorted(Path(directory).iterdir()):
        if entry.is_file():
            yield load_document(entry)


def query_body_to_json(q: QueryBody) -> dict:
    data: dict = {
        "conditions": [[c.path, c.op.value, c.literal] for c in q.conditions]
    }
    if q.projection is not None:
        data["projection"] = list(q.projection)
    if q.order_by is not None:
        data["order_by"] = [q.order_by[0], q.order_by[1]]
    return data


def query_body_from_json(data: dict) -> QueryBody:
    try:
        conditions = [
            Condition(path, Op(op), literal)
            for path, op, literal in data["conditions"]
        ]
        projection = data.get("projection")
        order_raw = data.get("order_by")
        order_by = (order_raw[0], order_raw[1]) if order_raw else None
    except (KeyError, ValueError, TypeError) as exc:
        raise StoreError(f"bad query body: {exc}") from exc
    if order_by and order_by[1] not in ("asc", "desc"):
        raise StoreError("order_by direction must be asc or desc")
    return QueryBody(conditions, projection, order_by)


def load_query_body(path: str | Path) -> QueryBody:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise StoreError(f"{path}: query body must be a JSON object")
    return query_body_from_json(data)
