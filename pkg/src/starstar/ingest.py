"""Parsing of external event-data files into a validated DbEventLog.

Two formats are supported:

- XOC subset (XML): root ``<log>`` with an ``<events>`` section of
  ``<event id activity timestamp>`` elements, each holding
  ``<objects><object ref="..."/></objects>`` references, and a sibling
  ``<objects>`` section of ``<object id class="..."/>`` declarations.
  Unknown elements and attributes are ignored with a warning; full
  per-event object-model snapshots found in the wild are thus skipped.

- JSONL: one record per line, either
  ``{"kind": "object", "id": ..., "class": ...}`` or
  ``{"kind": "event", "id": ..., "activity": ..., "timestamp": ...,
  "objects": [...], "attrs": {...}}``.  Record order does not matter.

Timestamps may be integers (used as-is) or ISO-8601 strings (converted to
milliseconds since epoch; naive datetimes are taken as UTC).
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Union

from .errors import DanglingRef, DuplicateId, ParseError, SchemaError
from .model import DbEventLog, Event, ObjectEntry, event_sort_key

logger = logging.getLogger("starstar.ingest")

_SCALARS = (str, int, float, bool)


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    location: str


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple = ()
    warnings: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def parse_timestamp(value) -> int:
    """Integer time units, or ISO-8601 converted to milliseconds since epoch."""
    if isinstance(value, bool):
        raise SchemaError(f"timestamp must be an integer or ISO-8601 string, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if value.is_integer():
            return int(value)
        raise SchemaError(f"non-integer numeric timestamp: {value!r}")
    if isinstance(value, str):
        s = value.strip()
        try:
            return int(s)
        except ValueError:
            pass
        try:
            dt = datetime.fromisoformat(s.replace("Z", "+00:00"))
        except ValueError:
            raise SchemaError(f"timestamp is neither an integer nor ISO-8601: {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(round(dt.timestamp() * 1000))
    raise SchemaError(f"unsupported timestamp value: {value!r}")


# --- validation ------------------------------------------------------------


def _validate_parts(events, objects, eo) -> ValidationReport:
    errors = []
    warnings = []

    seen_events = {}
    for e in events:
        seen_events[e.id] = seen_events.get(e.id, 0) + 1
    for eid, n in sorted(seen_events.items()):
        if n > 1:
            errors.append(ValidationIssue(
                "duplicate-event-id", f"event id {eid!r} declared {n} times", f"event:{eid}"))

    seen_objects = {}
    for o in objects:
        seen_objects[o.id] = seen_objects.get(o.id, 0) + 1
    for oid, n in sorted(seen_objects.items()):
        if n > 1:
            errors.append(ValidationIssue(
                "duplicate-object-id", f"object id {oid!r} declared {n} times", f"object:{oid}"))

    for e in events:
        ts = e.timestamp
        if isinstance(ts, bool) or not isinstance(ts, int):
            errors.append(ValidationIssue(
                "missing-timestamp", f"event {e.id!r} has no integer timestamp", f"event:{e.id}"))

    referenced_objects = set()
    referenced_events = set()
    for eid, oid in sorted(eo):
        referenced_events.add(eid)
        referenced_objects.add(oid)
        if eid not in seen_events:
            errors.append(ValidationIssue(
                "dangling-event-ref", f"eo pair references unknown event {eid!r}", f"event:{eid}"))
        if oid not in seen_objects:
            errors.append(ValidationIssue(
                "dangling-object-ref", f"eo pair references unknown object {oid!r}", f"object:{oid}"))

    for o in sorted(seen_objects):
        if o not in referenced_objects:
            warnings.append(ValidationIssue(
                "object-no-events", f"object {o!r} is related to no event", f"object:{o}"))
    for eid in sorted(seen_events):
        if eid not in referenced_events:
            warnings.append(ValidationIssue(
                "event-no-objects", f"event {eid!r} is related to no object", f"event:{eid}"))

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


def validate(log: DbEventLog) -> ValidationReport:
    """Report integrity errors and hygiene warnings for a log."""
    return _validate_parts(log.events, log.objects, log.eo)


_ERROR_BY_CODE = {
    "duplicate-event-id": DuplicateId,
    "duplicate-object-id": DuplicateId,
    "dangling-event-ref": DanglingRef,
    "dangling-object-ref": DanglingRef,
    "missing-timestamp": SchemaError,
}


def _build_log(events, objects, eo) -> DbEventLog:
    report = _validate_parts(events, objects, eo)
    if report.errors:
        first = report.errors[0]
        raise _ERROR_BY_CODE.get(first.code, SchemaError)(first.message)
    return DbEventLog(events=tuple(events), objects=tuple(objects), eo=frozenset(eo))


# --- XOC subset ------------------------------------------------------------

_XOC_EVENT_ATTRS = {"id", "activity", "timestamp"}
_XOC_OBJECT_DECL_ATTRS = {"id", "class"}


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xoc(document: Union[bytes, str]) -> DbEventLog:
    """Parse an XOC-subset XML document."""
    return _build_log(*_parse_xoc_parts(document))


def _parse_xoc_parts(document: Union[bytes, str]):
    if isinstance(document, str):
        document = document.encode("utf-8")
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise ParseError(f"malformed XML: {exc}", line=line, column=column) from None

    if _strip_ns(root.tag) != "log":
        raise SchemaError(f"root element must be <log>, got <{_strip_ns(root.tag)}>")

    events = []
    objects = []
    eo = set()

    for section in root:
        tag = _strip_ns(section.tag)
        if tag == "events":
            for el in section:
                if _strip_ns(el.tag) != "event":
                    logger.warning("ignoring unknown element <%s> in <events>", _strip_ns(el.tag))
                    continue
                eid = el.get("id")
                activity = el.get("activity")
                timestamp = el.get("timestamp")
                if eid is None:
                    raise SchemaError("<event> without id attribute")
                if activity is None:
                    raise SchemaError(f"event {eid!r} has no activity")
                if timestamp is None:
                    raise SchemaError(f"event {eid!r} has no timestamp")
                for attr in el.keys():
                    if attr not in _XOC_EVENT_ATTRS:
                        logger.warning("ignoring unknown attribute %r on event %r", attr, eid)
                events.append(Event(id=eid, activity=activity, timestamp=parse_timestamp(timestamp)))
                for child in el:
                    if _strip_ns(child.tag) != "objects":
                        logger.warning("ignoring unknown element <%s> in event %r", _strip_ns(child.tag), eid)
                        continue
                    for ref in child:
                        if _strip_ns(ref.tag) != "object":
                            logger.warning("ignoring unknown element <%s> in event %r objects", _strip_ns(ref.tag), eid)
                            continue
                        target = ref.get("ref")
                        if target is None:
                            raise SchemaError(f"object reference without ref attribute in event {eid!r}")
                        eo.add((eid, target))
        elif tag == "objects":
            for el in section:
                if _strip_ns(el.tag) != "object":
                    logger.warning("ignoring unknown element <%s> in <objects>", _strip_ns(el.tag))
                    continue
                oid = el.get("id")
                cls = el.get("class")
                if oid is None:
                    raise SchemaError("<object> declaration without id attribute")
                if cls is None:
                    raise SchemaError(f"object {oid!r} has no class")
                for attr in el.keys():
                    if attr not in _XOC_OBJECT_DECL_ATTRS:
                        logger.warning("ignoring unknown attribute %r on object %r", attr, oid)
                objects.append(ObjectEntry(id=oid, obj_class=cls))
        else:
            logger.warning("ignoring unknown element <%s> in <log>", tag)

    return events, objects, eo


def write_xoc(log: DbEventLog) -> bytes:
    """Serialize to the XOC subset; inverse of parse_xoc for attribute-free logs."""
    root = ET.Element("log")
    events_el = ET.SubElement(root, "events")
    for e in log.events:
        ev = ET.SubElement(events_el, "event", {
            "id": e.id, "activity": e.activity, "timestamp": str(e.timestamp)})
        refs = sorted(log._event_objects.get(e.id, ()))
        if refs:
            holder = ET.SubElement(ev, "objects")
            for oid in refs:
                ET.SubElement(holder, "object", {"ref": oid})
    objects_el = ET.SubElement(root, "objects")
    for o in log.objects:
        ET.SubElement(objects_el, "object", {"id": o.id, "class": o.obj_class})
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


# --- JSONL ------------------------------------------------------------------


def parse_jsonl(stream: Union[bytes, str, Iterable[str]]) -> DbEventLog:
    """Parse line-delimited JSON records of kind 'object' or 'event'."""
    return _build_log(*_parse_jsonl_parts(stream))


def _parse_jsonl_parts(stream: Union[bytes, str, Iterable[str]]):
    if isinstance(stream, bytes):
        lines = stream.decode("utf-8").splitlines()
    elif isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [line.rstrip("\n") for line in stream]

    events = []
    objects = []
    eo = set()

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON on line {lineno}: {exc.msg}", line=lineno) from None
        if not isinstance(record, dict):
            raise SchemaError(f"line {lineno}: record must be a JSON object")
        kind = record.get("kind")
        if kind == "object":
            oid = record.get("id")
            cls = record.get("class")
            if not isinstance(oid, str) or not oid:
                raise SchemaError(f"line {lineno}: object record needs a non-empty string id")
            if not isinstance(cls, str) or not cls:
                raise SchemaError(f"line {lineno}: object {oid!r} needs a non-empty string class")
            objects.append(ObjectEntry(id=oid, obj_class=cls))
        elif kind == "event":
            eid = record.get("id")
            activity = record.get("activity")
            if not isinstance(eid, str) or not eid:
                raise SchemaError(f"line {lineno}: event record needs a non-empty string id")
            if not isinstance(activity, str) or not activity:
                raise SchemaError(f"line {lineno}: event {eid!r} needs a non-empty string activity")
            if "timestamp" not in record:
                raise SchemaError(f"line {lineno}: event {eid!r} has no timestamp")
            timestamp = parse_timestamp(record["timestamp"])
            attrs = record.get("attrs", {})
            if not isinstance(attrs, dict) or not all(
                isinstance(k, str) and isinstance(v, _SCALARS) for k, v in attrs.items()
            ):
                raise SchemaError(f"line {lineno}: attrs of event {eid!r} must map names to scalars")
            refs = record.get("objects", [])
            if not isinstance(refs, list) or not all(isinstance(r, str) and r for r in refs):
                raise SchemaError(f"line {lineno}: objects of event {eid!r} must be a list of ids")
            events.append(Event(id=eid, activity=activity, timestamp=timestamp, attributes=dict(attrs)))
            for oid in refs:
                eo.add((eid, oid))
        else:
            raise SchemaError(f"line {lineno}: unknown record kind {kind!r}")

    return events, objects, eo


def write_jsonl(log: DbEventLog) -> bytes:
    """Canonical JSONL serialization: objects sorted by id, then ordered events."""
    lines = []
    for o in log.objects:
        lines.append(json.dumps(
            {"kind": "object", "id": o.id, "class": o.obj_class}, sort_keys=True))
    for e in sorted(log.events, key=event_sort_key):
        record = {
            "kind": "event",
            "id": e.id,
            "activity": e.activity,
            "timestamp": e.timestamp,
            "objects": sorted(log._event_objects.get(e.id, ())),
        }
        if e.attributes:
            record["attrs"] = dict(sorted(e.attributes.items()))
        lines.append(json.dumps(record, sort_keys=True))
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


_FORMATS = ("xoc", "jsonl")


def detect_format(path: str) -> str:
    """File-extension heuristic: .xoc/.xml -> xoc, anything else -> jsonl."""
    lower = path.lower()
    if lower.endswith((".xoc", ".xml")):
        return "xoc"
    return "jsonl"


def parse_path(path: str, fmt: str = "") -> DbEventLog:
    fmt = fmt or detect_format(path)
    if fmt not in _FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {_FORMATS}")
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_xoc(data) if fmt == "xoc" else parse_jsonl(data)


def validate_path(path: str, fmt: str = "") -> ValidationReport:
    """Full integrity report for a file; raises only on syntax-level errors."""
    fmt = fmt or detect_format(path)
    if fmt not in _FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {_FORMATS}")
    with open(path, "rb") as fh:
        data = fh.read()
    parts = _parse_xoc_parts(data) if fmt == "xoc" else _parse_jsonl_parts(data)
    return _validate_parts(*parts)
