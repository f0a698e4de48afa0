"""Synthetic-log benchmark for the model build.

Checks that construction time grows linearly in the number of eo pairs
(bounded object degree) and compares the kernel backends end to end.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

from . import kernels
from .graphs import build_a2a
from .kernels import available_backends
from .model import DbEventLog, Event, ObjectEntry

_ACTIVITIES = [f"act{i:02d}" for i in range(12)]


def synthetic_log(n_pairs: int, max_degree: int = 6, seed: int = 0) -> DbEventLog:
    """Log with ~n_pairs eo pairs and object degrees bounded by max_degree."""
    rng = random.Random(seed)
    n_events = max(2, n_pairs // 2)
    events = tuple(
        Event(id=f"e{k:07d}", activity=_ACTIVITIES[k % len(_ACTIVITIES)], timestamp=k * 10)
        for k in range(n_events)
    )
    objects = []
    eo = set()
    cursor = 0
    j = 0
    while len(eo) < n_pairs:
        degree = min(rng.randint(2, max_degree), n_pairs - len(eo))
        if degree < 1:
            break
        oid = f"o{j:07d}"
        objects.append(ObjectEntry(id=oid, obj_class=f"class{j % 3}"))
        for i in range(degree):
            eo.add((events[(cursor + i) % n_events].id, oid))
        cursor = (cursor + max(1, degree // 2)) % n_events
        j += 1
    return DbEventLog(events=events, objects=tuple(objects), eo=frozenset(eo))


@contextmanager
def use_backend(name: str):
    """Temporarily route the graph builders through a specific kernel."""
    impl = available_backends()[name]
    saved = (kernels.build_edges, kernels.aggregate_pairs, kernels.BACKEND)
    kernels.build_edges, kernels.aggregate_pairs, kernels.BACKEND = (
        impl.build_edges,
        impl.aggregate_pairs,
        impl.BACKEND,
    )
    try:
        yield
    finally:
        kernels.build_edges, kernels.aggregate_pairs, kernels.BACKEND = saved


def _time_build(log: DbEventLog, repeats: int = 3, floor: float = 0.05) -> float:
    """Seconds per full A2A build; min over repeats, inner-looped above a floor."""
    build_a2a(log)  # warm-up
    start = time.perf_counter()
    build_a2a(log)
    single = time.perf_counter() - start
    inner = max(1, int(floor / single) if single > 0 else 1)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            build_a2a(log)
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def run_scaling(sizes=(10_000, 20_000, 40_000), repeats: int = 3, seed: int = 0, backend: str = "") -> list:
    """Build time per size for one backend (default: the active one)."""
    rows = []
    with use_backend(backend or kernels.BACKEND):
        for n in sizes:
            log = synthetic_log(n, seed=seed)
            seconds = _time_build(log, repeats=repeats)
            rows.append({"backend": kernels.BACKEND, "pairs": n, "seconds": seconds})
    return rows


def run_bench(sizes=(10_000, 20_000, 40_000), repeats: int = 3, seed: int = 0) -> dict:
    """Scaling rows for every available backend plus doubling ratios."""
    report = {"sizes": list(sizes), "backends": {}}
    for name in sorted(available_backends()):
        rows = run_scaling(sizes=sizes, repeats=repeats, seed=seed, backend=name)
        ratios = [
            cur["seconds"] / prev["seconds"] if prev["seconds"] > 0 else float("inf")
            for prev, cur in zip(rows, rows[1:])
        ]
        report["backends"][name] = {"rows": rows, "doubling_ratios": ratios}
    return report


def format_report(report: dict) -> str:
    lines = []
    for name, data in report["backends"].items():
        lines.append(f"backend: {name}")
        for row in data["rows"]:
            lines.append(f"  {row['pairs']:>8} eo pairs  {row['seconds'] * 1e3:10.3f} ms/build")
        ratios = ", ".join(f"{r:.2f}" for r in data["doubling_ratios"])
        lines.append(f"  doubling ratios: {ratios}")
    names = list(report["backends"])
    if len(names) == 2:
        a, b = names
        rows_a = report["backends"][a]["rows"]
        rows_b = report["backends"][b]["rows"]
        speedups = ", ".join(
            f"{rb['seconds'] / ra['seconds']:.2f}x" for ra, rb in zip(rows_a, rows_b)
        )
        lines.append(f"speedup of {a} over {b}: {speedups}")
    return "\n".join(lines) + "\n"
