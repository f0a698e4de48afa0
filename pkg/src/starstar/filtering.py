"""Interactive filter semantics over model snapshots.

Two distinct mechanisms, mirroring how the visualization behaves:

- View filters (the sliders) only restrict what the A2A *display* shows;
  the underlying snapshot is never touched.  Activities below the minimum
  occurrence count are hidden together with their incident edges; path and
  weight thresholds hide edges only, so activities may become disconnected
  yet stay visible.

- The edge drill-down filter recomputes the model: objects of the selected
  edges' classes touching the edges' source activities are collected, only
  events related to at least one such object are kept, and all graphs are
  rebuilt from the resulting sub-log as a fresh immutable snapshot.

Checkpoints are named saves of snapshots that a filtering session can be
reset to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import NotFound
from .graphs import A2AMultigraph, ModelSnapshot, build_model
from .model import DbEventLog

# applied to the displayed graph when a model is first shown
DEFAULT_WEIGHT_THRESHOLD = 0.5

VIEW_KINDS = ("minActivityCount", "minPathCount", "weightThreshold")
EDGE_DRILL = "edgeDrill"


@dataclass(frozen=True)
class EdgeKey:
    obj_class: str
    source: str
    target: str


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    n: Optional[int] = None
    tau: Optional[float] = None
    edges: Tuple[EdgeKey, ...] = ()

    def __post_init__(self):
        if self.kind in ("minActivityCount", "minPathCount"):
            if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
                raise ValueError(f"{self.kind} requires a non-negative integer n")
        elif self.kind == "weightThreshold":
            if not isinstance(self.tau, (int, float)) or isinstance(self.tau, bool) or not 0.0 <= self.tau <= 1.0:
                raise ValueError("weightThreshold requires tau in [0, 1]")
        elif self.kind == EDGE_DRILL:
            if not self.edges:
                raise ValueError("edgeDrill requires a non-empty edge selection")
        else:
            raise ValueError(f"unknown filter kind: {self.kind!r}")

    @classmethod
    def from_dict(cls, payload: dict) -> "FilterSpec":
        if not isinstance(payload, dict):
            raise ValueError("filter spec must be a JSON object")
        kind = payload.get("kind")
        if kind in ("minActivityCount", "minPathCount"):
            return cls(kind=kind, n=payload.get("n"))
        if kind == "weightThreshold":
            return cls(kind=kind, tau=payload.get("tau"))
        if kind == EDGE_DRILL:
            raw = payload.get("edges")
            if not isinstance(raw, list):
                raise ValueError("edgeDrill requires an 'edges' list")
            edges = []
            for item in raw:
                if not isinstance(item, dict) or not all(
                    isinstance(item.get(k), str) for k in ("class", "source", "target")
                ):
                    raise ValueError("each edge key needs string class/source/target")
                edges.append(EdgeKey(item["class"], item["source"], item["target"]))
            return cls(kind=kind, edges=tuple(edges))
        raise ValueError(f"unknown filter kind: {kind!r}")

    def to_dict(self) -> dict:
        if self.kind in ("minActivityCount", "minPathCount"):
            return {"kind": self.kind, "n": self.n}
        if self.kind == "weightThreshold":
            return {"kind": self.kind, "tau": self.tau}
        return {
            "kind": self.kind,
            "edges": [
                {"class": e.obj_class, "source": e.source, "target": e.target}
                for e in self.edges
            ],
        }


def view(
    a2a: A2AMultigraph,
    min_activity_count: int = 0,
    min_path_count: int = 0,
    weight_threshold: float = 0.0,
) -> A2AMultigraph:
    """Display-level restriction of an A2A graph; the input is not modified."""
    nodes = {act: cnt for act, cnt in a2a.nodes.items() if cnt >= min_activity_count}
    edges = tuple(
        e
        for e in a2a.edges
        if e.count >= min_path_count
        and e.weight_norm >= weight_threshold
        and e.source in nodes
        and e.target in nodes
    )
    return A2AMultigraph(nodes=nodes, edges=edges)


def apply_view_filter(snapshot: ModelSnapshot, spec: FilterSpec) -> A2AMultigraph:
    if spec.kind == "minActivityCount":
        return view(snapshot.a2a, min_activity_count=spec.n)
    if spec.kind == "minPathCount":
        return view(snapshot.a2a, min_path_count=spec.n)
    if spec.kind == "weightThreshold":
        return view(snapshot.a2a, weight_threshold=spec.tau)
    raise ValueError(f"not a view filter kind: {spec.kind!r}")


def initial_view(snapshot: ModelSnapshot) -> A2AMultigraph:
    """The view shown when a model is first loaded."""
    return view(snapshot.a2a, weight_threshold=DEFAULT_WEIGHT_THRESHOLD)


def edge_drill_filter(snapshot: ModelSnapshot, selected: Tuple[EdgeKey, ...]) -> ModelSnapshot:
    """Recompute the model from events related to the selected edges' objects."""
    if not selected:
        raise ValueError("edge drill filter requires at least one selected edge")
    for key in selected:
        if not snapshot.a2a.has_edge(key.obj_class, key.source, key.target):
            raise NotFound(
                f"unknown a2a edge: ({key.obj_class!r}, {key.source!r} -> {key.target!r})")

    log = snapshot.log
    object_set = set()
    for key in selected:
        for obj in log.objects:
            if obj.obj_class != key.obj_class:
                continue
            if any(log.event(eid).activity == key.source
                   for eid in log._object_events.get(obj.id, ())):
                object_set.add(obj.id)

    kept_events = set()
    for oid in object_set:
        kept_events.update(log._object_events.get(oid, ()))

    events = tuple(e for e in log.events if e.id in kept_events)
    eo = frozenset((eid, oid) for eid, oid in log.eo if eid in kept_events)
    surviving = {oid for _, oid in eo}
    objects = tuple(o for o in log.objects if o.id in surviving)

    sublog = DbEventLog(events=events, objects=objects, eo=eo)
    return build_model(sublog)


def apply_filter(snapshot: ModelSnapshot, spec: FilterSpec):
    """Dispatch: view kinds return an A2A view, edgeDrill a new snapshot."""
    if spec.kind == EDGE_DRILL:
        return edge_drill_filter(snapshot, spec.edges)
    return apply_view_filter(snapshot, spec)


class CheckpointStore:
    """Named snapshot saves; same-name saves overwrite."""

    def __init__(self):
        self._by_name: dict = {}

    def save(self, name: str, snapshot: ModelSnapshot) -> None:
        if not name:
            raise ValueError("checkpoint name must be non-empty")
        self._by_name[name] = snapshot

    def reset(self, name: str) -> ModelSnapshot:
        try:
            return self._by_name[name]
        except KeyError:
            raise NotFound(f"unknown checkpoint: {name!r}") from None

    def names(self) -> tuple:
        return tuple(sorted(self._by_name))

    def __contains__(self, name: str) -> bool:
        return name in self._by_name
