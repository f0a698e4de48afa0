"""Graph models over database-extracted event data.

Builds an event-to-object graph, per-object directly-follows edges between
events, and their per-class aggregation between activities; supports
interactive filtering of the activities graph and projection of any class
perspective down to a classic case-grouped event log (XES/CSV).
"""

from .errors import (
    DanglingRef,
    DuplicateId,
    EmptyPerspective,
    NotFound,
    OutOfRange,
    ParseError,
    SchemaError,
    StarStarError,
    UndefinedSimilarity,
)
from .filtering import (
    DEFAULT_WEIGHT_THRESHOLD,
    CheckpointStore,
    EdgeKey,
    FilterSpec,
    apply_filter,
    apply_view_filter,
    edge_drill_filter,
    initial_view,
    view,
)
from .graphs import (
    A2AEdge,
    A2AMultigraph,
    E2EEdge,
    E2EMultigraph,
    E2OGraph,
    ModelSnapshot,
    a2a_to_dict,
    a2a_to_dot,
    a2a_to_json_bytes,
    build_a2a,
    build_e2e,
    build_e2o,
    build_model,
    e2e_neighborhood,
    e2e_to_dict,
)
from .ingest import (
    ValidationIssue,
    ValidationReport,
    parse_jsonl,
    parse_path,
    parse_xoc,
    validate,
    write_jsonl,
    write_xoc,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    Case,
    ClassicEventLog,
    DbEventLog,
    Event,
    ObjectEntry,
    compare_events,
    event_sort_key,
    kth_event,
    object_weight,
    related_events,
)
from .projection import (
    ProjectionParams,
    case_notion,
    export_csv,
    export_xes,
    project,
    projection_summary,
    sim,
)

__version__ = "0.1.0"
