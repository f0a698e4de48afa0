import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starstar import (
    DbEventLog,
    Event,
    NotFound,
    ObjectEntry,
    OutOfRange,
    compare_events,
    kth_event,
    object_weight,
    related_events,
)

import oracle
from conftest import engine_log


def ev(eid, ts, act="A"):
    return Event(id=eid, activity=act, timestamp=ts)


class TestCompareEvents:
    def test_timestamp_orders(self):
        assert compare_events(ev("e1", 100), ev("e2", 200)) == -1
        assert compare_events(ev("e2", 200), ev("e1", 100)) == 1

    def test_reflexive_equal(self):
        e = ev("e1", 100)
        assert compare_events(e, e) == 0

    def test_id_breaks_timestamp_ties(self):
        assert compare_events(ev("a", 100), ev("b", 100)) == -1
        assert compare_events(ev("b", 100), ev("a", 100)) == 1

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 9)), min_size=3, max_size=3))
    def test_total_order_on_random_triples(self, raw):
        a, b, c = [ev(f"e{i}", ts) for (ts, i) in raw]
        # exactly one of <, ==, > holds per pair
        for x, y in [(a, b), (b, c), (a, c)]:
            assert compare_events(x, y) == -compare_events(y, x)
        # transitivity
        if compare_events(a, b) <= 0 and compare_events(b, c) <= 0:
            assert compare_events(a, c) <= 0

    @given(st.integers(0, 100), st.integers(0, 100), st.text(min_size=1, max_size=3), st.text(min_size=1, max_size=3))
    def test_equal_iff_same_id(self, t1, t2, id1, id2):
        result = compare_events(ev(id1, t1), ev(id2, t2))
        if result == 0:
            assert id1 == id2 and t1 == t2


class TestRelatedEvents:
    def test_l1_values(self, l1):
        assert related_events(l1, "o1") == ("e1", "e2", "e3")
        assert related_events(l1, "o2") == ("e2", "e4")

    def test_object_without_events_is_empty(self, l1):
        log = DbEventLog(
            events=l1.events,
            objects=l1.objects + (ObjectEntry(id="o3", obj_class="order"),),
            eo=l1.eo,
        )
        assert related_events(log, "o3") == ()

    def test_unknown_object(self, l1):
        with pytest.raises(NotFound):
            related_events(l1, "nope")

    def test_ordering_follows_total_order_with_ties(self):
        log = DbEventLog(
            events=(ev("b", 100), ev("a", 100), ev("c", 50)),
            objects=(ObjectEntry(id="o", obj_class="x"),),
            eo=frozenset({("a", "o"), ("b", "o"), ("c", "o")}),
        )
        assert related_events(log, "o") == ("c", "a", "b")


class TestObjectWeight:
    def test_l1_values(self, l1):
        assert object_weight(l1, "o1") == 0.25
        assert object_weight(l1, "o2") == pytest.approx(1 / 3, rel=1e-12)

    def test_eventless_object_weighs_one(self, l1):
        log = DbEventLog(
            events=l1.events,
            objects=l1.objects + (ObjectEntry(id="o3", obj_class="order"),),
            eo=l1.eo,
        )
        assert object_weight(log, "o3") == 1.0

    def test_unknown_object(self, l1):
        with pytest.raises(NotFound):
            object_weight(l1, "ghost")

    def test_matches_reference_on_random_logs(self):
        rng = random.Random(7)
        for _ in range(25):
            raw = oracle.random_raw_log(rng)
            log = engine_log(raw)
            for oid, _ in raw.objects:
                assert object_weight(log, oid) == oracle.w(raw, oid)
                assert 0.0 < object_weight(log, oid) <= 1.0


class TestKthEvent:
    def test_l1_values(self, l1):
        assert kth_event(l1, "o1", 1) == "e1"
        assert kth_event(l1, "o1", 3) == "e3"

    def test_out_of_range(self, l1):
        with pytest.raises(OutOfRange):
            kth_event(l1, "o2", 3)
        with pytest.raises(OutOfRange):
            kth_event(l1, "o2", 0)

    def test_enumerates_related_events_without_repetition(self):
        rng = random.Random(13)
        for _ in range(25):
            raw = oracle.random_raw_log(rng)
            log = engine_log(raw)
            for oid, _ in raw.objects:
                seq = related_events(log, oid)
                walked = [kth_event(log, oid, k) for k in range(1, len(seq) + 1)]
                assert walked == list(seq)
                assert len(set(walked)) == len(walked)
                assert walked == [oracle.kth(raw, oid, k) for k in range(1, len(seq) + 1)]


class TestLogCanonicalization:
    def test_event_order_is_independent_of_input_order(self, l1):
        shuffled = DbEventLog(
            events=tuple(reversed(l1.events)),
            objects=tuple(reversed(l1.objects)),
            eo=l1.eo,
        )
        assert shuffled == l1
        assert [e.id for e in shuffled.events] == ["e1", "e2", "e3", "e4"]

    def test_order_is_timestamp_consistent(self):
        rng = random.Random(99)
        for _ in range(20):
            raw = oracle.random_raw_log(rng)
            log = engine_log(raw)
            stamps = [e.timestamp for e in log.events]
            assert stamps == sorted(stamps)
