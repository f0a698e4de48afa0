"""Core domain model: events, objects, logs, cases, and the object helpers.

A ``DbEventLog`` is an event log as extracted from a database: a set of
events with activities and integer timestamps, a set of typed objects, and
an event-object relation.  No case grouping exists at this level; cases are
introduced by projection (see :mod:`starstar.projection`).

Timestamps are integers in one consistent unit per log (milliseconds since
epoch recommended).  The total order over events is timestamp-ascending with
lexicographic event-id tie-break, which keeps builds reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import NotFound, OutOfRange

Scalar = object  # str | int | float | bool in practice


@dataclass(frozen=True)
class Event:
    id: str
    activity: str
    timestamp: int
    attributes: Mapping[str, Scalar] = field(default_factory=dict)


@dataclass(frozen=True)
class ObjectEntry:
    id: str
    obj_class: str


def event_sort_key(e: Event):
    """Sort key realizing the total order: timestamp, then event id."""
    return (e.timestamp, e.id)


def compare_events(a: Event, b: Event) -> int:
    """Total order on events: -1/0/+1; equal only for the same event id."""
    ka, kb = event_sort_key(a), event_sort_key(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def _sortable(events) -> bool:
    return all(isinstance(e.timestamp, int) and not isinstance(e.timestamp, bool) for e in events)


@dataclass(frozen=True)
class DbEventLog:
    """Immutable event log; construction canonicalizes ordering.

    ``events`` is kept sorted by the total order, ``objects`` by id, and
    ``eo`` as a frozenset of (event_id, object_id) pairs, so two logs with
    the same content compare equal regardless of input ordering.

    Direct construction is tolerant of broken input (duplicates, dangling
    references, missing timestamps) so that :func:`starstar.ingest.validate`
    can report on it; anything downstream assumes a validated log.
    """

    events: tuple = ()
    objects: tuple = ()
    eo: frozenset = frozenset()

    # derived lookup caches, not part of equality
    _event_by_id: dict = field(default_factory=dict, compare=False, repr=False)
    _object_by_id: dict = field(default_factory=dict, compare=False, repr=False)
    _object_events: dict = field(default_factory=dict, compare=False, repr=False)
    _event_objects: dict = field(default_factory=dict, compare=False, repr=False)
    _order_index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        events = tuple(self.events)
        if _sortable(events):
            events = tuple(sorted(events, key=event_sort_key))
        objects = tuple(sorted(self.objects, key=lambda o: o.id))
        eo = frozenset(self.eo)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "eo", eo)

        ev_by_id = {}
        for e in events:
            ev_by_id.setdefault(e.id, e)
        obj_by_id = {}
        for o in objects:
            obj_by_id.setdefault(o.id, o)
        order_index = {e.id: i for i, e in enumerate(events)}

        obj_events = {o.id: [] for o in objects}
        ev_objects = {e.id: set() for e in events}
        for eid, oid in eo:
            if eid in ev_objects and oid in obj_events:
                obj_events[oid].append(eid)
                ev_objects[eid].add(oid)
        for oid, lst in obj_events.items():
            lst.sort(key=lambda eid: order_index[eid])

        object.__setattr__(self, "_event_by_id", ev_by_id)
        object.__setattr__(self, "_object_by_id", obj_by_id)
        object.__setattr__(self, "_object_events", {k: tuple(v) for k, v in obj_events.items()})
        object.__setattr__(self, "_event_objects", {k: frozenset(v) for k, v in ev_objects.items()})
        object.__setattr__(self, "_order_index", order_index)

    def event(self, event_id: str) -> Event:
        try:
            return self._event_by_id[event_id]
        except KeyError:
            raise NotFound(f"unknown event id: {event_id!r}") from None

    def object_entry(self, object_id: str) -> ObjectEntry:
        try:
            return self._object_by_id[object_id]
        except KeyError:
            raise NotFound(f"unknown object id: {object_id!r}") from None

    def order_rank(self, event_id: str) -> int:
        """Position of the event in the total order (0-based)."""
        try:
            return self._order_index[event_id]
        except KeyError:
            raise NotFound(f"unknown event id: {event_id!r}") from None

    def has_event(self, event_id: str) -> bool:
        return event_id in self._event_by_id

    def has_object(self, object_id: str) -> bool:
        return object_id in self._object_by_id


def related_events(log: DbEventLog, object_id: str) -> tuple:
    """Events related to the object, ordered by the total order."""
    if not log.has_object(object_id):
        raise NotFound(f"unknown object id: {object_id!r}")
    return log._object_events.get(object_id, ())


def object_weight(log: DbEventLog, object_id: str) -> float:
    """1 / (number of related events + 1); in (0, 1]."""
    return 1.0 / (len(related_events(log, object_id)) + 1)


def kth_event(log: DbEventLog, object_id: str, k: int) -> str:
    """The k-th related event of the object, 1-based."""
    seq = related_events(log, object_id)
    if not 1 <= k <= len(seq):
        raise OutOfRange(f"k={k} out of range 1..{len(seq)} for object {object_id!r}")
    return seq[k - 1]


@dataclass(frozen=True)
class Case:
    id: str
    events: frozenset
    source_object: Optional[str] = None

    def __post_init__(self):
        if not self.events:
            raise ValueError("a case must contain at least one event")


@dataclass(frozen=True)
class ClassicEventLog:
    """Case-grouped event log; one event may belong to several cases."""

    cases: tuple = ()
    events: tuple = ()

    def __post_init__(self):
        events = tuple(self.events)
        if _sortable(events):
            events = tuple(sorted(events, key=event_sort_key))
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "cases", tuple(sorted(self.cases, key=lambda c: c.id)))
        object.__setattr__(self, "_event_by_id", {e.id: e for e in events})
        object.__setattr__(self, "_order_index", {e.id: i for i, e in enumerate(events)})

    _event_by_id: dict = field(default_factory=dict, compare=False, repr=False)
    _order_index: dict = field(default_factory=dict, compare=False, repr=False)

    def event(self, event_id: str) -> Event:
        try:
            return self._event_by_id[event_id]
        except KeyError:
            raise NotFound(f"unknown event id: {event_id!r}") from None

    def trace(self, case: Case) -> tuple:
        """Events of the case sorted by the total order."""
        return tuple(sorted(case.events, key=self._order_index.__getitem__))
