import json
import random

import numpy as np
import pytest

from starstar import (
    DbEventLog,
    Event,
    NotFound,
    ObjectEntry,
    a2a_to_dict,
    a2a_to_dot,
    a2a_to_json_bytes,
    build_a2a,
    build_e2e,
    build_e2o,
    build_model,
    e2e_neighborhood,
)
from starstar.kernels import available_backends

import oracle
from conftest import engine_log


class TestBuildE2O:
    def test_l1_adjacency(self, l1):
        e2o = build_e2o(l1)
        assert e2o.objects_of("e2") == frozenset({"o1", "o2"})
        assert e2o.events_of("o1") == ("e1", "e2", "e3")

    def test_empty_log(self):
        e2o = build_e2o(DbEventLog())
        assert e2o.event_objects == {} and e2o.object_events == {}

    def test_isolated_nodes_are_present(self):
        log = DbEventLog(
            events=(Event(id="e1", activity="A", timestamp=1),),
            objects=(ObjectEntry(id="o1", obj_class="c"),),
            eo=frozenset(),
        )
        e2o = build_e2o(log)
        assert e2o.objects_of("e1") == frozenset()
        assert e2o.events_of("o1") == ()

    def test_unknown_lookups(self, l1):
        e2o = build_e2o(l1)
        with pytest.raises(NotFound):
            e2o.objects_of("eX")
        with pytest.raises(NotFound):
            e2o.events_of("oX")

    def test_edges_mirror_eo_exactly(self):
        rng = random.Random(3)
        for _ in range(20):
            raw = oracle.random_raw_log(rng)
            e2o = build_e2o(engine_log(raw))
            pairs = {(e, o) for e, objs in e2o.event_objects.items() for o in objs}
            assert pairs == raw.eo
            pairs2 = {(e, o) for o, evs in e2o.object_events.items() for e in evs}
            assert pairs2 == raw.eo


def edges_as_dicts(e2e):
    return [
        {"obj": e.obj, "i": e.index, "in": e.in_event, "out": e.out_event,
         "weight": e.weight, "perf": e.perf}
        for e in e2e.edges
    ]


class TestBuildE2E:
    def test_l1_frozen_values(self, l1):
        e2e = build_e2e(l1)
        assert edges_as_dicts(e2e) == [
            {"obj": "o1", "i": 2, "in": "e1", "out": "e2", "weight": 0.25, "perf": 100},
            {"obj": "o1", "i": 3, "in": "e2", "out": "e3", "weight": 0.25, "perf": 100},
            {"obj": "o2", "i": 2, "in": "e2", "out": "e4", "weight": 1 / 3, "perf": 200},
        ]

    def test_single_event_objects_make_no_edges(self):
        log = DbEventLog(
            events=(Event(id="e1", activity="A", timestamp=1), Event(id="e2", activity="B", timestamp=2)),
            objects=(ObjectEntry(id="o1", obj_class="c"), ObjectEntry(id="o2", obj_class="c")),
            eo=frozenset({("e1", "o1"), ("e2", "o2")}),
        )
        assert len(build_e2e(log)) == 0

    def test_pair_lookup(self, l1):
        e2e = build_e2e(l1)
        edges = e2e.between("e2", "e3")
        assert len(edges) == 1 and edges[0].obj == "o1" and edges[0].index == 3
        assert e2e.between("e3", "e2") == ()

    def test_edge_count_matches_degree_sum(self):
        rng = random.Random(11)
        for _ in range(30):
            raw = oracle.random_raw_log(rng)
            e2e = build_e2e(engine_log(raw))
            expected = sum(max(0, len(oracle.g(raw, oid)) - 1) for oid, _ in raw.objects)
            assert len(e2e) == expected
            assert all(e.perf >= 0 for e in e2e.edges)

    def test_empty_log_builds_an_empty_model(self):
        snap = build_model(DbEventLog())
        assert len(snap.e2e) == 0
        assert snap.a2a.nodes == {} and snap.a2a.edges == ()

    def test_matches_reference_on_random_logs(self):
        rng = random.Random(17)
        for _ in range(30):
            raw = oracle.random_raw_log(rng)
            ours = edges_as_dicts(build_e2e(engine_log(raw)))
            reference = oracle.e2e_edges(raw)
            key = lambda d: (d["obj"], d["i"])
            assert sorted(ours, key=key) == sorted(reference, key=key)

    def test_duplicate_timestamps_give_zero_perf(self):
        log = DbEventLog(
            events=(Event(id="b", activity="X", timestamp=5), Event(id="a", activity="Y", timestamp=5)),
            objects=(ObjectEntry(id="o", obj_class="c"),),
            eo=frozenset({("a", "o"), ("b", "o")}),
        )
        (edge,) = build_e2e(log).edges
        assert edge.perf == 0
        assert (edge.in_event, edge.out_event) == ("a", "b")


class TestBuildA2A:
    def test_l1_frozen_values(self, l1):
        a2a = build_a2a(l1)
        assert a2a.nodes == {"A": 1, "B": 2, "C": 1}
        rows = [
            (e.obj_class, e.source, e.target, e.count, e.weight, e.weight_norm, e.perf)
            for e in a2a.edges
        ]
        assert rows == [
            ("item", "B", "B", 1, 1 / 3, 1.0, 200.0),
            ("order", "A", "B", 1, 0.25, 1.0, 100.0),
            ("order", "B", "C", 1, 0.25, 1.0, 100.0),
        ]

    def test_empty_e2e_still_counts_activities(self):
        log = DbEventLog(
            events=(Event(id="e1", activity="A", timestamp=1),),
            objects=(ObjectEntry(id="o1", obj_class="c"),),
            eo=frozenset({("e1", "o1")}),
        )
        a2a = build_a2a(log)
        assert a2a.edges == () and a2a.nodes == {"A": 1}

    def test_matches_reference_on_random_logs(self):
        rng = random.Random(23)
        for _ in range(30):
            raw = oracle.random_raw_log(rng)
            a2a = build_a2a(engine_log(raw))
            reference = oracle.a2a_edges(raw)
            norms = oracle.a2a_weight_norm(raw)
            ours = {(e.obj_class, e.source, e.target): e for e in a2a.edges}
            assert set(ours) == set(reference)
            for key, ref in reference.items():
                e = ours[key]
                assert e.count == ref["count"]
                assert e.weight == pytest.approx(ref["weight"], rel=1e-12)
                assert e.perf == pytest.approx(ref["perf"], rel=1e-12)
                assert e.weight_norm == pytest.approx(norms[key], rel=1e-12)
            assert a2a.nodes == oracle.activity_counts(raw)

    def test_weight_times_count_consistency(self):
        rng = random.Random(29)
        for _ in range(20):
            raw = oracle.random_raw_log(rng)
            log = engine_log(raw)
            e2e = build_e2e(log)
            a2a = build_a2a(log, e2e)
            for edge in a2a.edges:
                contributing = [
                    fe for fe in e2e.edges
                    if log.object_entry(fe.obj).obj_class == edge.obj_class
                    and log.event(fe.in_event).activity == edge.source
                    and log.event(fe.out_event).activity == edge.target
                ]
                assert len(contributing) == edge.count
                assert edge.weight == pytest.approx(sum(f.weight for f in contributing), rel=1e-9)
                assert edge.perf * edge.count == pytest.approx(sum(f.perf for f in contributing), rel=1e-9)

    def test_per_class_counts_add_up(self):
        rng = random.Random(31)
        for _ in range(20):
            raw = oracle.random_raw_log(rng)
            a2a = build_a2a(engine_log(raw))
            per_class = {}
            for e in a2a.edges:
                per_class[e.obj_class] = per_class.get(e.obj_class, 0) + e.count
            for cls in per_class:
                expected = sum(
                    max(0, len(oracle.g(raw, oid)) - 1)
                    for oid, c in raw.objects if c == cls
                )
                assert per_class[cls] == expected


class TestNeighborhood:
    def test_radius_one_around_hub(self, l1):
        snap = build_model(l1)
        sub = e2e_neighborhood(snap, "e2", 1)
        assert len(sub) == 3

    def test_radius_one_around_leaf(self, l1):
        snap = build_model(l1)
        sub = e2e_neighborhood(snap, "e4", 1)
        assert edges_as_dicts(sub) == [
            {"obj": "o2", "i": 2, "in": "e2", "out": "e4", "weight": 1 / 3, "perf": 200}
        ]

    def test_radius_zero_is_empty(self, l1):
        snap = build_model(l1)
        assert len(e2e_neighborhood(snap, "e1", 0)) == 0

    def test_unknown_event(self, l1):
        with pytest.raises(NotFound):
            e2e_neighborhood(build_model(l1), "eX", 1)

    def test_radius_two_reaches_across_hub(self, l1):
        snap = build_model(l1)
        sub = e2e_neighborhood(snap, "e4", 2)
        assert len(sub) == 3


class TestKernelParity:
    def test_both_backends_agree(self):
        backends = available_backends()
        if len(backends) < 2:
            pytest.skip("compiled kernel not built")
        rng = random.Random(41)
        for _ in range(25):
            raw = oracle.random_raw_log(rng)
            log = engine_log(raw)
            from starstar.graphs import _columns

            cols = _columns(log)
            _, _, acts, _, timestamps, act_codes, class_codes, obj_events, offsets, obj_weights = cols
            results = {}
            for name, impl in backends.items():
                built = impl.build_edges(obj_events, offsets, timestamps)
                agg = impl.aggregate_pairs(
                    built[0], built[2], built[3], built[4],
                    obj_weights, act_codes, class_codes, len(acts))
                results[name] = (built, agg)
            (built_a, agg_a), (built_b, agg_b) = results.values()
            for col_a, col_b in zip(built_a, built_b):
                assert np.array_equal(col_a, col_b)
            assert set(agg_a) == set(agg_b)
            for key in agg_a:
                # identical accumulation order makes the sums bit-identical
                assert agg_a[key] == agg_b[key]


class TestExports:
    def test_a2a_json_shape_and_order(self, l1):
        a2a = build_a2a(l1)
        payload = a2a_to_dict(a2a)
        assert list(payload) == ["nodes", "edges"]
        assert [n["activity"] for n in payload["nodes"]] == ["A", "B", "C"]
        assert [(e["class"], e["source"], e["target"]) for e in payload["edges"]] == [
            ("item", "B", "B"), ("order", "A", "B"), ("order", "B", "C"),
        ]
        assert list(payload["edges"][0]) == [
            "class", "source", "target", "count", "weight", "weightNorm", "perf",
        ]

    def test_json_bytes_deterministic(self, l1):
        a2a = build_a2a(l1)
        assert a2a_to_json_bytes(a2a) == a2a_to_json_bytes(a2a)
        parsed = json.loads(a2a_to_json_bytes(a2a, indent=2))
        assert len(parsed["edges"]) == 3

    def test_dot_export(self, l1):
        dot = a2a_to_dot(build_a2a(l1), metric="weight")
        assert dot.startswith("digraph a2a {")
        assert '"B" -> "B" [label="item (0.33)"' in dot
        assert '"A" -> "B" [label="order (0.25)"' in dot
        assert "penwidth=" in dot

    def test_dot_count_metric_uses_integers(self, l1):
        dot = a2a_to_dot(build_a2a(l1), metric="count")
        assert '[label="order (1)"' in dot

    def test_dot_rejects_unknown_metric(self, l1):
        with pytest.raises(ValueError):
            a2a_to_dot(build_a2a(l1), metric="frequency")


class TestLinearScaling:
    def test_doubling_pairs_roughly_doubles_time(self):
        from starstar.bench import run_scaling

        rows = run_scaling(sizes=(4000, 8000, 16000), repeats=3, seed=5)
        for prev, cur in zip(rows, rows[1:]):
            assert cur["seconds"] / prev["seconds"] <= 2.5
