"""The three graphs built over a DbEventLog, and the model snapshot.

- E2O: bipartite event/object adjacency, a direct view of the eo relation.
- E2E: one directed edge per consecutive event pair within each object's
  related-event sequence, carrying the object, its weight, and the elapsed
  time between the two events.
- A2A: the E2E edges aggregated per (object class, activity pair), carrying
  occurrence count, summed weight, per-class normalized weight, and mean
  elapsed time.  This is the graph a user actually looks at.

Construction cost is linear in the number of eo pairs; the inner loops run
on the kernel backend selected in :mod:`starstar.kernels`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from . import kernels
from .errors import NotFound
from .model import DbEventLog

__all__ = [
    "E2OGraph",
    "E2EEdge",
    "E2EMultigraph",
    "A2AEdge",
    "A2AMultigraph",
    "ModelSnapshot",
    "build_e2o",
    "build_e2e",
    "build_a2a",
    "build_model",
    "e2e_neighborhood",
    "a2a_to_dict",
    "a2a_to_json_bytes",
    "a2a_to_dot",
    "e2e_to_dict",
]


@dataclass(frozen=True)
class E2OGraph:
    """Bipartite adjacency; object side ordered by the event total order."""

    event_objects: dict
    object_events: dict

    def objects_of(self, event_id: str) -> frozenset:
        try:
            return self.event_objects[event_id]
        except KeyError:
            raise NotFound(f"unknown event id: {event_id!r}") from None

    def events_of(self, object_id: str) -> tuple:
        try:
            return self.object_events[object_id]
        except KeyError:
            raise NotFound(f"unknown object id: {object_id!r}") from None


@dataclass(frozen=True)
class E2EEdge:
    obj: str
    index: int  # 2-based position of the pair within the object's event run
    in_event: str
    out_event: str
    weight: float
    perf: int


class E2EMultigraph:
    """Directly-follows edges between events, one per (object, position).

    Edge attribute arrays are kept in columnar form; `E2EEdge` objects are
    materialized lazily so that aggregate consumers stay on the fast path.
    """

    def __init__(self, edges=None, _columns=None):
        if _columns is not None:
            self._columns = _columns  # (obj_ids, event_ids, eo, ep, ei, eo2, eperf, weights)
            self._edge_tuple = None
        else:
            self._columns = None
            self._edge_tuple = tuple(edges or ())

    @classmethod
    def _from_arrays(cls, object_ids, event_ids, edge_obj, edge_pos, edge_in, edge_out, edge_perf, obj_weights):
        return cls(_columns=(object_ids, event_ids, edge_obj, edge_pos, edge_in, edge_out, edge_perf, obj_weights))

    def __len__(self) -> int:
        if self._edge_tuple is not None:
            return len(self._edge_tuple)
        return int(self._columns[2].shape[0])

    @property
    def edges(self) -> tuple:
        if self._edge_tuple is None:
            object_ids, event_ids, eo, ep, ei, eu, eperf, weights = self._columns
            self._edge_tuple = tuple(
                E2EEdge(
                    obj=object_ids[eo[k]],
                    index=int(ep[k]),
                    in_event=event_ids[ei[k]],
                    out_event=event_ids[eu[k]],
                    weight=float(weights[eo[k]]),
                    perf=int(eperf[k]),
                )
                for k in range(len(eo))
            )
        return self._edge_tuple

    @cached_property
    def _by_pair(self) -> dict:
        index = {}
        for edge in self.edges:
            index.setdefault((edge.in_event, edge.out_event), []).append(edge)
        return {pair: tuple(lst) for pair, lst in index.items()}

    @cached_property
    def _by_event(self) -> dict:
        index = {}
        for edge in self.edges:
            index.setdefault(edge.in_event, []).append(edge)
            if edge.out_event != edge.in_event:
                index.setdefault(edge.out_event, []).append(edge)
        return index

    def between(self, in_event: str, out_event: str) -> tuple:
        """All edges from in_event to out_event (possibly several objects)."""
        return self._by_pair.get((in_event, out_event), ())

    def incident(self, event_id: str) -> tuple:
        return tuple(self._by_event.get(event_id, ()))

    def __eq__(self, other):
        return isinstance(other, E2EMultigraph) and self.edges == other.edges

    def __repr__(self):
        return f"E2EMultigraph({len(self)} edges)"


@dataclass(frozen=True)
class A2AEdge:
    obj_class: str
    source: str
    target: str
    count: int
    weight: float
    weight_norm: float
    perf: float


@dataclass(frozen=True)
class A2AMultigraph:
    """Activity nodes (with occurrence counts) plus aggregated class edges."""

    nodes: dict
    edges: tuple

    _by_key: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(
            self.edges, key=lambda e: (e.obj_class, e.source, e.target))))
        object.__setattr__(self, "_by_key", {
            (e.obj_class, e.source, e.target): e for e in self.edges})

    def edge(self, obj_class: str, source: str, target: str) -> "A2AEdge":
        try:
            return self._by_key[(obj_class, source, target)]
        except KeyError:
            raise NotFound(f"unknown a2a edge: ({obj_class!r}, {source!r} -> {target!r})") from None

    def has_edge(self, obj_class: str, source: str, target: str) -> bool:
        return (obj_class, source, target) in self._by_key

    def between(self, source: str, target: str) -> tuple:
        """All class edges between two activities."""
        return tuple(e for e in self.edges if e.source == source and e.target == target)


@dataclass(frozen=True)
class ModelSnapshot:
    """Immutable (log, E2O, E2E, A2A) quadruple; the unit of checkpointing."""

    log: DbEventLog
    e2o: E2OGraph
    e2e: E2EMultigraph
    a2a: A2AMultigraph
    snapshot_id: str


def build_e2o(log: DbEventLog) -> E2OGraph:
    """Adjacency view of the eo relation; includes isolated events/objects."""
    return E2OGraph(
        event_objects=dict(log._event_objects),
        object_events=dict(log._object_events),
    )


def _columns(log: DbEventLog):
    """Columnar encoding of the log for the kernels."""
    event_ids = [e.id for e in log.events]
    ev_index = {eid: i for i, eid in enumerate(event_ids)}
    timestamps = np.fromiter((e.timestamp for e in log.events), dtype=np.int64, count=len(event_ids))

    acts = sorted({e.activity for e in log.events})
    act_index = {a: i for i, a in enumerate(acts)}
    act_codes = np.fromiter((act_index[e.activity] for e in log.events), dtype=np.int64, count=len(event_ids))

    object_ids = [o.id for o in log.objects]
    classes = sorted({o.obj_class for o in log.objects})
    class_index = {c: i for i, c in enumerate(classes)}
    class_codes = np.fromiter((class_index[o.obj_class] for o in log.objects), dtype=np.int64, count=len(object_ids))

    flat = []
    offsets = np.zeros(len(object_ids) + 1, dtype=np.int64)
    for j, oid in enumerate(object_ids):
        run = log._object_events.get(oid, ())
        flat.extend(ev_index[eid] for eid in run)
        offsets[j + 1] = len(flat)
    obj_events = np.asarray(flat, dtype=np.int64)
    degrees = np.diff(offsets)
    obj_weights = 1.0 / (degrees + 1.0)

    return event_ids, object_ids, acts, classes, timestamps, act_codes, class_codes, obj_events, offsets, obj_weights


def build_e2e(log: DbEventLog) -> E2EMultigraph:
    event_ids, object_ids, _, _, timestamps, _, _, obj_events, offsets, obj_weights = _columns(log)
    edge_obj, edge_pos, edge_in, edge_out, edge_perf = kernels.build_edges(obj_events, offsets, timestamps)
    return E2EMultigraph._from_arrays(
        object_ids, event_ids, edge_obj, edge_pos, edge_in, edge_out, edge_perf, obj_weights)


def build_a2a(log: DbEventLog, e2e: Optional[E2EMultigraph] = None) -> A2AMultigraph:
    """Aggregate E2E into class/activity-pair edges; node counts come from the log."""
    event_ids, object_ids, acts, classes, timestamps, act_codes, class_codes, obj_events, offsets, obj_weights = _columns(log)

    if e2e is not None and e2e._columns is not None:
        _, _, edge_obj, _, edge_in, edge_out, edge_perf, _ = e2e._columns
    elif e2e is not None:
        # edge-materialized multigraph (e.g. a neighborhood subgraph)
        ev_index = {eid: i for i, eid in enumerate(event_ids)}
        obj_index = {oid: j for j, oid in enumerate(object_ids)}
        edge_obj = np.fromiter((obj_index[e.obj] for e in e2e.edges), dtype=np.int64, count=len(e2e))
        edge_in = np.fromiter((ev_index[e.in_event] for e in e2e.edges), dtype=np.int64, count=len(e2e))
        edge_out = np.fromiter((ev_index[e.out_event] for e in e2e.edges), dtype=np.int64, count=len(e2e))
        edge_perf = np.fromiter((e.perf for e in e2e.edges), dtype=np.int64, count=len(e2e))
    else:
        edge_obj, _, edge_in, edge_out, edge_perf = kernels.build_edges(obj_events, offsets, timestamps)

    n_acts = len(acts)
    grouped = kernels.aggregate_pairs(
        edge_obj, edge_in, edge_out, edge_perf, obj_weights, act_codes, class_codes, n_acts)

    class_max: dict = {}
    decoded = []
    for key, (count, weight_sum, perf_sum) in grouped.items():
        key = int(key)
        a2 = key % n_acts
        a1 = (key // n_acts) % n_acts
        c = key // (n_acts * n_acts)
        decoded.append((classes[c], acts[a1], acts[a2], count, weight_sum, perf_sum))
        prev = class_max.get(classes[c], 0.0)
        if weight_sum > prev:
            class_max[classes[c]] = weight_sum

    edges = tuple(
        A2AEdge(
            obj_class=cls,
            source=a1,
            target=a2,
            count=count,
            weight=weight_sum,
            weight_norm=weight_sum / class_max[cls],
            perf=perf_sum / count,
        )
        for cls, a1, a2, count, weight_sum, perf_sum in decoded
    )

    node_counts: dict = {}
    for e in log.events:
        node_counts[e.activity] = node_counts.get(e.activity, 0) + 1

    return A2AMultigraph(nodes=node_counts, edges=edges)


def snapshot_id_for(log: DbEventLog) -> str:
    """Content-addressed snapshot id, stable across processes."""
    from .ingest import write_jsonl

    return "s" + hashlib.sha256(write_jsonl(log)).hexdigest()[:12]


def build_model(log: DbEventLog) -> ModelSnapshot:
    e2e = build_e2e(log)
    return ModelSnapshot(
        log=log,
        e2o=build_e2o(log),
        e2e=e2e,
        a2a=build_a2a(log, e2e),
        snapshot_id=snapshot_id_for(log),
    )


def e2e_neighborhood(snapshot: ModelSnapshot, event_id: str, radius: int) -> E2EMultigraph:
    """Edges traversed within `radius` undirected hops from the event."""
    if not snapshot.log.has_event(event_id):
        raise NotFound(f"unknown event id: {event_id!r}")
    e2e = snapshot.e2e
    selected = []
    seen_edges = set()
    frontier = {event_id}
    visited = {event_id}
    for _ in range(radius):
        nxt = set()
        for ev in frontier:
            for edge in e2e.incident(ev):
                key = (edge.obj, edge.index)
                if key not in seen_edges:
                    seen_edges.add(key)
                    selected.append(edge)
                other = edge.out_event if edge.in_event == ev else edge.in_event
                if other not in visited:
                    visited.add(other)
                    nxt.add(other)
        frontier = nxt
        if not frontier:
            break
    selected.sort(key=lambda e: (e.obj, e.index))
    return E2EMultigraph(edges=selected)


# --- serialization ---------------------------------------------------------


def a2a_to_dict(a2a: A2AMultigraph) -> dict:
    """Stable-ordered plain-dict form of the A2A graph."""
    return {
        "nodes": [
            {"activity": act, "count": count}
            for act, count in sorted(a2a.nodes.items())
        ],
        "edges": [
            {
                "class": e.obj_class,
                "source": e.source,
                "target": e.target,
                "count": e.count,
                "weight": e.weight,
                "weightNorm": e.weight_norm,
                "perf": e.perf,
            }
            for e in a2a.edges
        ],
    }


def a2a_to_json_bytes(a2a: A2AMultigraph, indent: Optional[int] = None) -> bytes:
    import json

    text = json.dumps(a2a_to_dict(a2a), indent=indent)
    if indent is not None:
        text += "\n"
    return text.encode("utf-8")


_METRICS = ("count", "weight", "perf")


def _metric_value(edge: A2AEdge, metric: str) -> float:
    if metric == "count":
        return float(edge.count)
    if metric == "weight":
        return edge.weight
    if metric == "perf":
        return edge.perf
    raise ValueError(f"unknown metric: {metric!r}")


def _format_metric(edge: A2AEdge, metric: str) -> str:
    if metric == "count":
        return str(edge.count)
    return f"{_metric_value(edge, metric):.2f}"


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def a2a_to_dot(a2a: A2AMultigraph, metric: str = "count") -> str:
    """Graphviz rendering; label '<class> (<metric value>)', pen width by metric."""
    if metric not in _METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    max_count = max(a2a.nodes.values(), default=0)
    max_value = max((_metric_value(e, metric) for e in a2a.edges), default=0.0)
    lines = ["digraph a2a {", "  rankdir=LR;", '  node [shape=box, style=filled];']
    for act, count in sorted(a2a.nodes.items()):
        shade = 90 - int(60 * (count / max_count)) if max_count else 90
        lines.append(
            f"  {_dot_quote(act)} [label={_dot_quote(f'{act} ({count})')}, fillcolor=gray{shade}"
            + (", fontcolor=white" if shade < 55 else "")
            + "];"
        )
    for e in a2a.edges:
        value = _metric_value(e, metric)
        penwidth = 1.0 + (3.0 * value / max_value if max_value > 0 else 0.0)
        label = f"{e.obj_class} ({_format_metric(e, metric)})"
        lines.append(
            f"  {_dot_quote(e.source)} -> {_dot_quote(e.target)} "
            f"[label={_dot_quote(label)}, penwidth={penwidth:.2f}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def e2e_to_dict(e2e: E2EMultigraph) -> dict:
    return {
        "edges": [
            {
                "object": e.obj,
                "index": e.index,
                "source": e.in_event,
                "target": e.out_event,
                "weight": e.weight,
                "perf": e.perf,
            }
            for e in e2e.edges
        ]
    }
