"""Typed messages for the three trading-service ontologies (Lookup,
Register, Admin), their line-delimited wire codec, and the request/response
legality checker.

Wire format: one JSON record per line, UTF-8, LF terminated, with fields
``cid``, ``ontology``, ``kind``, ``name``, ``payload``, ``sender``,
``receiver``, ``visited``. The ``name`` field uses the published element
identifiers verbatim, underscores included (``SetMax_search_card``,
``NotEmptyOfferSeq``, ...).

The response legality checker has two modes. The default mode is the
relation the trader actually honors (every trader response is legal against
its triggering action). ``strict=True`` checks the literal formal condition
tables instead, which differ in four places: Export pairs with
IllegalOfferId rather than IllegalOffer, Describe does not allow
UnknownOfferId, WithdrawnOffer is only legal carrying an offer payload the
message type does not have, and InvalidValue is not allowed for
SetOffer_repos. Condition lines requiring a concept the predicate type
cannot carry (the Modified* family) are checked at the action-predicate
level in strict mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import ClassVar

from .store import Document, QueryBody, document_from_json, document_to_json
from .store import query_body_from_json, query_body_to_json


class Ontology(str, Enum):
    LOOKUP = "lookup"
    REGISTER = "register"
    ADMIN = "admin"


class MessageKind(str, Enum):
    ACTION = "action"
    PREDICATE = "predicate"


class CodecError(Exception):
    """Base for wire decode failures."""


class MalformedMessage(CodecError):
    """Record is syntactically broken or payload fields have wrong shapes."""


class UnknownVariant(CodecError):
    """Unrecognized action/predicate name: protocol version mismatch."""


# ---------------------------------------------------------------------------
# Concepts
# ---------------------------------------------------------------------------

class QueryLevel(str, Enum):
    METAMETA = "metameta"
    META = "meta"
    # reserved: refinement of a previous query is undefined and unimplemented


@dataclass(frozen=True)
class QueryForm:
    """A query plus its addressing. Exactly one of ``uri`` (a file holding
    the query body) and ``body`` (inline) must be present."""

    id: str
    type: QueryLevel
    source: str
    target: str
    uri: str | None = None
    body: QueryBody | None = None

    def __post_init__(self) -> None:
        if (self.uri is None) == (self.body is None):
            raise ValueError("QueryForm needs exactly one of uri/body")


@dataclass(frozen=True)
class Policy:
    name: str
    value: int | bool


@dataclass(frozen=True)
class Offer:
    """A metadata document, inline or by file reference. Exactly one of
    ``uri``/``document`` must be present."""

    uri: str | None = None
    document: Document | None = None

    def __post_init__(self) -> None:
        if (self.uri is None) == (self.document is None):
            raise ValueError("Offer needs exactly one of uri/document")


@dataclass(frozen=True)
class LocatedOffer:
    """One lookup hit: the document plus the trader that held it."""

    origin: str
    document: Document


@dataclass
class OfferSeq:
    query_id: str
    entries: list[LocatedOffer]
    uri: str | None = None


@dataclass(frozen=True)
class MatchEntry:
    record_id: str
    percentage: int


@dataclass
class OfferSeqMatch:
    entries: list[MatchEntry]
    uri: str | None = None


# ---------------------------------------------------------------------------
# Messages
# ---------------------------------------------------------------------------

@dataclass(kw_only=True)
class Message:
    ontology: ClassVar[Ontology]
    kind: ClassVar[MessageKind]
    name: ClassVar[str]


@dataclass(kw_only=True)
class Action(Message):
    kind: ClassVar[MessageKind] = MessageKind.ACTION


@dataclass(kw_only=True)
class Predicate(Message):
    kind: ClassVar[MessageKind] = MessageKind.PREDICATE
    returned_message: str = ""


REGISTRY: dict[tuple[Ontology, str], type[Message]] = {}


def _message(ontology: Ontology, name: str):
    def wrap(cls):
        cls.ontology = ontology
        cls.name = name
        REGISTRY[(ontology, name)] = cls
        return cls

    return wrap


# Lookup ontology -----------------------------------------------------------

@_message(Ontology.LOOKUP, "Query")
@dataclass(kw_only=True)
class Query(Action):
    form: QueryForm | None = None
    policies: tuple[Policy, ...] = ()


@_message(Ontology.LOOKUP, "UnknownQueryForm")
@dataclass(kw_only=True)
class UnknownQueryForm(Predicate):
    pass


@_message(Ontology.LOOKUP, "PolicyTypeMismatch")
@dataclass(kw_only=True)
class PolicyTypeMismatch(Predicate):
    pass


@_message(Ontology.LOOKUP, "InvalidPolicyValue")
@dataclass(kw_only=True)
class InvalidPolicyValue(Predicate):
    pass


@_message(Ontology.LOOKUP, "DuplicatePolicyName")
@dataclass(kw_only=True)
class DuplicatePolicyName(Predicate):
    pass


@_message(Ontology.LOOKUP, "QueryError")
@dataclass(kw_only=True)
class QueryError(Predicate):
    pass


@_message(Ontology.LOOKUP, "EmptyOfferSeq")
@dataclass(kw_only=True)
class EmptyOfferSeq(Predicate):
    pass


@_message(Ontology.LOOKUP, "NotEmptyOfferSeq")
@dataclass(kw_only=True)
class NotEmptyOfferSeq(Predicate):
    offers: OfferSeq | None = None
    matches: OfferSeqMatch | None = None


# Register ontology ---------------------------------------------------------

@_message(Ontology.REGISTER, "Export")
@dataclass(kw_only=True)
class Export(Action):
    offer: Offer | None = None


@_message(Ontology.REGISTER, "Modify")
@dataclass(kw_only=True)
class Modify(Action):
    offer_id: str | None = None
    offer: Offer | None = None


@_message(Ontology.REGISTER, "Withdraw")
@dataclass(kw_only=True)
class Withdraw(Action):
    offer_id: str | None = None


@_message(Ontology.REGISTER, "Describe")
@dataclass(kw_only=True)
class Describe(Action):
    offer_id: str | None = None


@_message(Ontology.REGISTER, "IllegalOffer")
@dataclass(kw_only=True)
class IllegalOffer(Predicate):
    pass


@_message(Ontology.REGISTER, "UnknownOffer")
@dataclass(kw_only=True)
class UnknownOffer(Predicate):
    pass


@_message(Ontology.REGISTER, "DuplicateOffer")
@dataclass(kw_only=True)
class DuplicateOffer(Predicate):
    pass


@_message(Ontology.REGISTER, "IllegalOfferId")
@dataclass(kw_only=True)
class IllegalOfferId(Predicate):
    pass


@_message(Ontology.REGISTER, "UnknownOfferId")
@dataclass(kw_only=True)
class UnknownOfferId(Predicate):
    pass


@_message(Ontology.REGISTER, "QueryError")
@dataclass(kw_only=True)
class RegisterQueryError(Predicate):
    pass


@_message(Ontology.REGISTER, "ExportedOffer")
@dataclass(kw_only=True)
class ExportedOffer(Predicate):
    offer_id: str | None = None


@_message(Ontology.REGISTER, "ModifiedOffer")
@dataclass(kw_only=True)
class ModifiedOffer(Predicate):
    offer_id: str | None = None


@_message(Ontology.REGISTER, "WithdrawnOffer")
@dataclass(kw_only=True)
class WithdrawnOffer(Predicate):
    pass


@_message(Ontology.REGISTER, "NotDescribedOffer")
@dataclass(kw_only=True)
class NotDescribedOffer(Predicate):
    pass


@_message(Ontology.REGISTER, "DescribedOffer")
@dataclass(kw_only=True)
class DescribedOffer(Predicate):
    offer: Offer | None = None


# Admin ontology ------------------------------------------------------------

@_message(Ontology.ADMIN, "SetDef_search_card")
@dataclass(kw_only=True)
class SetDefSearchCard(Action):
    value: int | None = None


@_message(Ontology.ADMIN, "SetMax_search_card")
@dataclass(kw_only=True)
class SetMaxSearchCard(Action):
    value: int | None = None


@_message(Ontology.ADMIN, "SetOffer_repos")
@dataclass(kw_only=True)
class SetOfferRepos(Action):
    uri: str | None = None


@_message(Ontology.ADMIN, "GetDef_search_card")
@dataclass(kw_only=True)
class GetDefSearchCard(Action):
    pass


@_message(Ontology.ADMIN, "GetMax_search_card")
@dataclass(kw_only=True)
class GetMaxSearchCard(Action):
    pass


@_message(Ontology.ADMIN, "GetOffer_repos")
@dataclass(kw_only=True)
class GetOfferRepos(Action):
    pass


@_message(Ontology.ADMIN, "ModifiedDef_search_card")
@dataclass(kw_only=True)
class ModifiedDefSearchCard(Predicate):
    pass


@_message(Ontology.ADMIN, "ModifiedMax_search_card")
@dataclass(kw_only=True)
class ModifiedMaxSearchCard(Predicate):
    pass


@_message(Ontology.ADMIN, "ModifiedOffer_repos")
@dataclass(kw_only=True)
class ModifiedOfferRepos(Predicate):
    pass


@_message(Ontology.ADMIN, "ReturnedDef_search_card")
@dataclass(kw_only=True)
class ReturnedDefSearchCard(Predicate):
    value: int | None = None


@_message(Ontology.ADMIN, "ReturnedMax_search_card")
@dataclass(kw_only=True)
class ReturnedMaxSearchCard(Predicate):
    value: int | None = None


@_message(Ontology.ADMIN, "ReturnedOffer_repos")
@dataclass(kw_only=True)
class ReturnedOfferRepos(Predicate):
    uri: str | None = None


@_message(Ontology.ADMIN, "InvalidValue")
@dataclass(kw_only=True)
class InvalidValue(Predicate):
    pass


# ---------------------------------------------------------------------------
# Envelope and codec
# ---------------------------------------------------------------------------

@dataclass
class Envelope:
    """One protocol message between module addresses. ``visited`` is the
    federation loop guard: the trader ids a forwarded query has already
    passed through. It lives on the envelope because loop guarding is a
    transport concern, not ontology content."""

    cid: str
    sender: str
    receiver: str
    body: Message
    visited: frozenset[str] = field(default_factory=frozenset)


def _query_form_to_json(form: QueryForm) -> dict:
    data: dict = {
        "id": form.id,
        "type": form.type.value,
        "source": form.source,
        "target": form.target,
    }
    if form.uri is not None:
        data["uri"] = form.uri
    if form.body is not None:
        data["body"] = query_body_to_json(form.body)
    return data


def _query_form_from_json(data) -> QueryForm:
    _need_object(data, "form")
    try:
        return QueryForm(
            id=_need_str(data, "id"),
            type=QueryLevel(data.get("type")),
            source=_need_str(data, "source"),
            target=_need_str(data, "target"),
            uri=_opt_str(data, "uri"),
            body=query_body_from_json(data["body"]) if "body" in data else None,
        )
    except MalformedMessage:
        raise
    except Exception as exc:
        raise MalformedMessage(f"bad query form: {exc}") from exc


def _policies_to_json(policies: tuple[Policy, ...]) -> list:
    return [[p.name, p.value] for p in policies]


def _policies_from_json(data) -> tuple[Policy, ...]:
    if not isinstance(data, list):
        raise MalformedMessage("policies must be a list")
    out = []
    for item in data:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not isinstance(item[0], str)
            or not isinstance(item[1], (int, bool))
        ):
            raise MalformedMessage(f"bad policy entry: {item!r}")
        out.append(Policy(item[0], item[1]))
    return tuple(out)


def _offer_to_json(offer: Offer) -> dict:
    data: dict = {}
    if offer.uri is not None:
        data["uri"] = offer.uri
    if offer.document is not None:
        data["document"] = document_to_json(offer.document)
    return data


def _offer_from_json(data) -> Offer:
    _need_object(data, "offer")
    try:
        return Offer(
            uri=_opt_str(data, "uri"),
            document=document_from_json(data["document"]) if "document" in data else None,
        )
    except MalformedMessage:
        raise
    except Exception as exc:
        raise MalformedMessage(f"bad offer: {exc}") from exc


def _offer_seq_to_json(seq: OfferSeq) -> dict:
    data: dict = {
        "query_id": seq.query_id,
        "entries": [
            {"origin": e.origin, "document": document_to_json(e.document)}
            for e in seq.entries
        ],
    }
    if seq.uri is not None:
        data["uri"] = seq.uri
    return data


def _offer_seq_from_json(data) -> OfferSeq:
    _need_object(data, "offers")
    try:
        entries = [
            LocatedOffer(entry["origin"], document_from_json(entry["document"]))
            for entry in data["entries"]
        ]
        return OfferSeq(_need_str(data, "query_id"), entries, _opt_str(data, "uri"))
    except MalformedMessage:
        raise
    except Exception as exc:
        raise MalformedMessage(f"bad offer sequence: {exc}") from exc


def _matches_to_json(matches: OfferSeqMatch) -> dict:
    data: dict = {"entries": [[e.record_id, e.percentage] for e in matches.entries]}
    if matches.uri is not None:
        data["uri"] = matches.uri
    return data


def _matches_from_json(data) -> OfferSeqMatch:
    _need_object(data, "matches")
    try:
        entries = []
        for item in data["entries"]:
            record_id, pct = item
            if not isinstance(record_id, str) or not isinstance(pct, int) or isinstance(pct, bool):
                raise MalformedMessage(f"bad match entry: {item!r}")
            entries.append(MatchEntry(record_id, pct))
        return OfferSeqMatch(entries, _opt_str(data, "uri"))
    except MalformedMessage:
        raise
    except Exception as exc:
        raise MalformedMessage(f"bad match sequence: {exc}") from exc


def _need_object(data, what: str) -> None:
    if not isinstance(data, dict):
        raise MalformedMessage(f"{what} must be an object")


def _need_str(data: dict, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise MalformedMessage(f"{key} must be a string")
    return value


def _opt_str(data: dict, key: str) -> str | None:
    value = data.get(key)
    if value is not None and not isinstance(value, str):
        raise MalformedMessage(f"{key} must be a string")
    return value


def _check_int(value, key: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedMessage(f"{key} must be an integer")
    return value


def _check_str(value, key: str) -> str:
    if not isinstance(value, str):
        raise MalformedMessage(f"{key} must be a string")
    return value


# Message payload fields come from a fixed vocabulary, so the codec can be
# keyed by field name.
_FIELD_ENCODERS = {
    "form": _query_form_to_json,
    "policies": _policies_to_json,
    "offers": _offer_seq_to_json,
    "matches": _matches_to_json,
    "offer": _offer_to_json,
    "offer_id": lambda v: v,
    "value": lambda v: v,
    "uri": lambda v: v,
    "returned_message": lambda v: v,
}

_FIELD_DECODERS = {
    "form": _query_form_from_json,
    "policies": _policies_from_json,
    "offers": _offer_seq_from_json,
    "matches": _matches_from_json,
    "offer": _offer_from_json,
    "offer_id": lambda v: _check_str(v, "offer_id"),
    "value": lambda v: _check_int(v, "value"),
    "uri": lambda v: _check_str(v, "uri"),
    "returned_message": lambda v: _check_str(v, "returned_message"),
}


def _payload_to_json(msg: Message) -> dict:
    payload: dict = {}
    for f in fields(msg):
        value = getattr(msg, f.name)
        if value is None:
            continue
        if f.name == "policies" and value == ():
            continue
        payload[f.name] = _FIELD_ENCODERS[f.name](value)
    return payload


def _payload_from_json(cls: type[Message], payload) -> Message:
    _need_object(payload, "payload")
    declared = {f.name for f in fields(cls)}
    unknown = set(payload) - declared
    if unknown:
        raise MalformedMessage(f"unknown payload fields for {cls.name}: {sorted(unknown)}")
    kwargs = {}
    for key, raw in payload.items():
        kwargs[key] = _FIELD_DECODERS[key](raw)
    return cls(**kwargs)


def encode(env: Envelope) -> bytes:
    """Serialize to one UTF-8, LF-terminated wire line. Inverse of decode."""
    record = {
        "cid": env.cid,
        "ontology": env.body.ontology.value,
        "kind": env.body.kind.value,
        "name": env.body.name,
        "payload": _payload_to_json(env.body),
        "sender": env.sender,
        "receiver": env.receiver,
        "visited": sorted(env.visited),
    }
    return (json.dumps(record, ensure_ascii=False) + "\n").encode("utf-8")


def decode(data: bytes) -> Envelope:
    """Parse one wire line. Raises MalformedMessage for syntax/shape errors
    and UnknownVariant for unrecognized message names."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedMessage(f"not UTF-8: {exc}") from exc
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedMessage(f"not a JSON record: {exc}") from exc
    if not isinstance(record, dict):
        raise MalformedMessage("wire record must be a JSON object")
    missing = {"cid", "ontology", "kind", "name", "payload", "sender", "receiver", "visited"} - set(record)
    if missing:
        raise MalformedMessage(f"missing wire fields: {sorted(missing)}")
    try:
        ontology = Ontology(record["ontology"])
    except ValueError as exc:
        raise MalformedMessage(f"unknown ontology {record['ontology']!r}") from exc
    name = record["name"]
    if not isinstance(name, str):
        raise MalformedMessage("name must be a string")
    cls = REGISTRY.get((ontology, name))
    if cls is None:
        raise UnknownVariant(f"{ontology.value} has no element named {name!r}")
    if record["kind"] != cls.kind.value:
        raise MalformedMessage(f"{name} is a {cls.kind.value}, record says {record['kind']!r}")
    body = _payload_from_json(cls, record["payload"])
    visited = record["visited"]
    if not isinstance(visited, list) or not all(isinstance(v, str) for v in visited):
        raise MalformedMessage("visited must be a list of trader ids")
    return Envelope(
        cid=_check_str(record["cid"], "cid"),
        sender=_check_str(record["sender"], "sender"),
        receiver=_check_str(record["receiver"], "receiver"),
        body=body,
        visited=frozenset(visited),
    )


# ---------------------------------------------------------------------------
# Legality: request relation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IllegalRequest:
    reason: str


@dataclass(frozen=True)
class IllegalResponse:
    reason: str


def validate_request(msg: Message) -> IllegalRequest | None:
    """Check an action against its ontology's request relation: Query needs
    a QueryForm (PolicySeq optional); Export an Offer; Modify OfferId and
    Offer; Withdraw/Describe an OfferId; Set actions their value; Get
    actions carry nothing. Returns None when legal."""
    if msg.kind is not MessageKind.ACTION:
        return IllegalRequest(f"{msg.name} is not an action")
    if isinstance(msg, Query):
        if msg.form is None:
            return IllegalRequest("Query requires a QueryForm")
        return None
    if isinstance(msg, Export):
        if msg.offer is None:
            return IllegalRequest("Export requires an Offer")
        return None
    if isinstance(msg, Modify):
        if msg.offer_id is None:
            return IllegalRequest("Modify requires an OfferId")
        if msg.offer is None:
            return IllegalRequest("Modify requires an Offer")
        return None
    if isinstance(msg, (Withdraw, Describe)):
        if msg.offer_id is None:
            return IllegalRequest(f"{msg.name} requires an OfferId")
        return None
    if isinstance(msg, (SetDefSearchCard, SetMaxSearchCard)):
        if msg.value is None:
            return IllegalRequest(f"{msg.name} requires a cardinality value")
        return None
    if isinstance(msg, SetOfferRepos):
        if msg.uri is None:
            return IllegalRequest("SetOffer_repos requires a repository locator")
        return None
    if isinstance(msg, (GetDefSearchCard, GetMaxSearchCard, GetOfferRepos)):
        return None
    return IllegalRequest(f"unknown action {msg.name}")


# ---------------------------------------------------------------------------
# Legality: response relation
# ---------------------------------------------------------------------------

def _predicate_concepts(pred: Predicate) -> frozenset[str]:
    names = []
    if isinstance(pred, NotEmptyOfferSeq):
        if pred.offers is not None:
            names.append("OfferSeq")
        if pred.matches is not None:
            names.append("OfferSeqMatch")
    elif isinstance(pred, (ExportedOffer, ModifiedOffer)):
        if pred.offer_id is not None:
            names.append("OfferId")
    elif isinstance(pred, DescribedOffer):
        if pred.offer is not None:
            names.append("Offer")
    elif isinstance(pred, ReturnedDefSearchCard):
        if pred.value is not None:
            names.append("Def_search_card")
    elif isinstance(pred, ReturnedMaxSearchCard):
        if pred.value is not None:
            names.append("Max_search_card")
    elif isinstance(pred, ReturnedOfferRepos):
        if pred.uri is not None:
            names.append("Offer_repos")
    return frozenset(names)


def _rel(*lines: tuple[str, str, tuple[frozenset, ...]]) -> dict:
    table: dict[str, dict[str, tuple[frozenset, ...]]] = {}
    for action, predicate, concept_sets in lines:
        table.setdefault(action, {})[predicate] = concept_sets
    return table


_BARE = (frozenset(),)
_OFFER_SEQ_FORMS = (frozenset({"OfferSeq"}), frozenset({"OfferSeq", "OfferSeqMatch"}))

_LOOKUP_RESPONSES = _rel(
    ("Query", "UnknownQueryForm", _BARE),
    ("Query", "PolicyTypeMismatch", _BARE),
    ("Query", "InvalidPolicyValue", _BARE),
    ("Query", "DuplicatePolicyName", _BARE),
    ("Query", "QueryError", _BARE),
    ("Query", "EmptyOfferSeq", _BARE),
    ("Query", "NotEmptyOfferSeq", _OFFER_SEQ_FORMS),
)

_REGISTER_RESPONSES = _rel(
    ("Export", "IllegalOffer", _BARE),
    ("Export", "UnknownOffer", _BARE),
    ("Export", "DuplicateOffer", _BARE),
    ("Export", "ExportedOffer", (frozenset({"OfferId"}),)),
    ("Modify", "IllegalOfferId", _BARE),
    ("Modify", "UnknownOfferId", _BARE),
    ("Modify", "IllegalOffer", _BARE),
    ("Modify", "UnknownOffer", _BARE),
    ("Modify", "DuplicateOffer", _BARE),
    ("Modify", "ModifiedOffer", (frozenset({"OfferId"}),)),
    ("Withdraw", "IllegalOfferId", _BARE),
    ("Withdraw", "UnknownOfferId", _BARE),
    ("Withdraw", "WithdrawnOffer", _BARE),
    ("Describe", "IllegalOfferId", _BARE),
    ("Describe", "UnknownOfferId", _BARE),
    ("Describe", "QueryError", _BARE),
    ("Describe", "NotDescribedOffer", _BARE),
    ("Describe", "DescribedOffer", (frozenset({"Offer"}),)),
)

_ADMIN_RESPONSES = _rel(
    ("SetDef_search_card", "ModifiedDef_search_card", _BARE),
    ("SetDef_search_card", "InvalidValue", _BARE),
    ("SetMax_search_card", "ModifiedMax_search_card", _BARE),
    ("SetMax_search_card", "InvalidValue", _BARE),
    ("SetOffer_repos", "ModifiedOffer_repos", _BARE),
    ("SetOffer_repos", "InvalidValue", _BARE),
    ("GetDef_search_card", "ReturnedDef_search_card", (frozenset({"Def_search_card"}),)),
    ("GetMax_search_card", "ReturnedMax_search_card", (frozenset({"Max_search_card"}),)),
    ("GetOffer_repos", "ReturnedOffer_repos", (frozenset({"Offer_repos"}),)),
)

DEFAULT_RESPONSES = {
    Ontology.LOOKUP: _LOOKUP_RESPONSES,
    Ontology.REGISTER: _REGISTER_RESPONSES,
    Ontology.ADMIN: _ADMIN_RESPONSES,
}

# Literal formal condition tables. Deltas from the default relation:
# Export pairs with IllegalOfferId (not IllegalOffer); Describe omits
# UnknownOfferId; WithdrawnOffer requires an Offer concept it cannot carry;
# InvalidValue is only a SetDef/SetMax outcome.
_STRICT_REGISTER = _rel(
    ("Export", "IllegalOfferId", _BARE),
    ("Export", "UnknownOffer", _BARE),
    ("Export", "DuplicateOffer", _BARE),
    ("Export", "ExportedOffer", (frozenset({"OfferId"}),)),
    ("Modify", "IllegalOfferId", _BARE),
    ("Modify", "UnknownOfferId", _BARE),
    ("Modify", "IllegalOffer", _BARE),
    ("Modify", "UnknownOffer", _BARE),
    ("Modify", "DuplicateOffer", _BARE),
    ("Modify", "ModifiedOffer", (frozenset({"OfferId"}),)),
    ("Withdraw", "IllegalOfferId", _BARE),
    ("Withdraw", "UnknownOfferId", _BARE),
    ("Withdraw", "WithdrawnOffer", (frozenset({"Offer"}),)),
    ("Describe", "QueryError", _BARE),
    ("Describe", "IllegalOfferId", _BARE),
    ("Describe", "NotDescribedOffer", _BARE),
    ("Describe", "DescribedOffer", (frozenset({"Offer"}),)),
)

_STRICT_ADMIN = _rel(
    ("SetDef_search_card", "ModifiedDef_search_card", _BARE),
    ("SetDef_search_card", "InvalidValue", _BARE),
    ("SetMax_search_card", "ModifiedMax_search_card", _BARE),
    ("SetMax_search_card", "InvalidValue", _BARE),
    ("SetOffer_repos", "ModifiedOffer_repos", _BARE),
    ("GetDef_search_card", "ReturnedDef_search_card", (frozenset({"Def_search_card"}),)),
    ("GetMax_search_card", "ReturnedMax_search_card", (frozenset({"Max_search_card"}),)),
    ("GetOffer_repos", "ReturnedOffer_repos", (frozenset({"Offer_repos"}),)),
)

STRICT_RESPONSES = {
    Ontology.LOOKUP: _LOOKUP_RESPONSES,
    Ontology.REGISTER: _STRICT_REGISTER,
    Ontology.ADMIN: _STRICT_ADMIN,
}


def validate_response(
    action: Message, response: Message, *, strict: bool = False
) -> IllegalResponse | None:
    """Check a (action, predicate, carried concepts) triple against the
    response relation. Cross-ontology pairs are always illegal. Returns
    None when legal."""
    if action.kind is not MessageKind.ACTION:
        return IllegalResponse(f"{action.name} is not an action")
    if response.kind is not MessageKind.PREDICATE:
        return IllegalResponse(f"{response.name} is not a predicate")
    if action.ontology is not response.ontology:
        return IllegalResponse(
            f"cross-ontology: {action.ontology.value} action answered by "
            f"{response.ontology.value} predicate"
        )
    table = (STRICT_RESPONSES if strict else DEFAULT_RESPONSES)[action.ontology]
    allowed = table.get(action.name)
    if allowed is None:
        return IllegalResponse(f"no response line for action {action.name}")
    concept_sets = allowed.get(response.name)
    if concept_sets is None:
        return IllegalResponse(f"{response.name} is not a legal response to {action.name}")
    carried = _predicate_concepts(response)  # type: ignore[arg-type]
    if carried not in concept_sets:
        want = " or ".join(
            "{" + ", ".join(sorted(cs)) + "}" if cs else "no concepts"
            for cs in concept_sets
        )
        return IllegalResponse(
            f"{action.name} x {response.name} carries {sorted(carried) or 'nothing'}, "
            f"condition line requires {want}"
        )
    return None
