import json

import pytest

from starstar import (
    DanglingRef,
    DbEventLog,
    DuplicateId,
    Event,
    ObjectEntry,
    ParseError,
    SchemaError,
    parse_jsonl,
    parse_xoc,
    validate,
    write_jsonl,
    write_xoc,
)
from starstar.ingest import parse_timestamp


class TestParseXoc:
    def test_l1_round_trip(self, l1_xoc_bytes, l1):
        assert parse_xoc(l1_xoc_bytes) == l1

    def test_empty_document(self):
        log = parse_xoc(b"<log><events/><objects/></log>")
        assert log == DbEventLog()

    def test_dangling_reference(self):
        doc = b"""<log>
          <events><event id="e1" activity="A" timestamp="1">
            <objects><object ref="oX"/></objects></event></events>
          <objects/>
        </log>"""
        with pytest.raises(DanglingRef):
            parse_xoc(doc)

    def test_malformed_xml_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_xoc(b"<log><events></log>")
        assert err.value.line is not None

    def test_missing_timestamp(self):
        with pytest.raises(SchemaError):
            parse_xoc(b'<log><events><event id="e1" activity="A"/></events><objects/></log>')

    def test_missing_activity(self):
        with pytest.raises(SchemaError):
            parse_xoc(b'<log><events><event id="e1" timestamp="5"/></events><objects/></log>')

    def test_duplicate_event_id(self):
        doc = b"""<log><events>
          <event id="e1" activity="A" timestamp="1"/>
          <event id="e1" activity="B" timestamp="2"/>
        </events><objects/></log>"""
        with pytest.raises(DuplicateId):
            parse_xoc(doc)

    def test_unknown_elements_are_ignored(self, caplog):
        doc = b"""<log>
          <global/>
          <events><event id="e1" activity="A" timestamp="1" lifecycle="start">
            <objects><object ref="o1"/></objects>
            <model><snapshot/></model>
          </event></events>
          <objects><object id="o1" class="c"/></objects>
        </log>"""
        with caplog.at_level("WARNING", logger="starstar.ingest"):
            log = parse_xoc(doc)
        assert log.event("e1").activity == "A"
        assert len(caplog.records) >= 2

    def test_iso_timestamps_become_milliseconds(self):
        doc = b"""<log><events>
          <event id="e1" activity="A" timestamp="1970-01-01T00:00:00.100Z"/>
        </events><objects/></log>"""
        assert parse_xoc(doc).event("e1").timestamp == 100


class TestParseJsonl:
    def test_l1_round_trip(self, l1_jsonl_bytes, l1):
        assert parse_jsonl(l1_jsonl_bytes) == l1

    def test_empty_file(self):
        assert parse_jsonl(b"") == DbEventLog()

    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            parse_jsonl(b'{"kind":"evnt", "id":"e1"}')

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(ParseError) as err:
            parse_jsonl(b'{"kind":"object","id":"o1","class":"c"}\n{oops\n')
        assert err.value.line == 2

    def test_record_order_is_irrelevant(self, l1_jsonl_bytes, l1):
        lines = [ln for ln in l1_jsonl_bytes.decode().splitlines() if ln]
        reordered = "\n".join(reversed(lines)).encode()
        assert parse_jsonl(reordered) == l1

    def test_dangling_reference(self):
        with pytest.raises(DanglingRef):
            parse_jsonl(b'{"kind":"event","id":"e1","activity":"A","timestamp":1,"objects":["oX"]}')

    def test_duplicate_object_id(self):
        doc = b'{"kind":"object","id":"o1","class":"a"}\n{"kind":"object","id":"o1","class":"b"}'
        with pytest.raises(DuplicateId):
            parse_jsonl(doc)

    def test_attributes_survive(self):
        doc = b'{"kind":"event","id":"e1","activity":"A","timestamp":1,"attrs":{"resource":"bob","cost":3}}'
        log = parse_jsonl(doc)
        assert log.event("e1").attributes == {"resource": "bob", "cost": 3}

    def test_non_scalar_attribute_rejected(self):
        doc = b'{"kind":"event","id":"e1","activity":"A","timestamp":1,"attrs":{"nested":{"a":1}}}'
        with pytest.raises(SchemaError):
            parse_jsonl(doc)


class TestTimestamps:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (100, 100),
            (100.0, 100),
            ("100", 100),
            ("1970-01-01T00:00:01+00:00", 1000),
            ("1970-01-01T00:00:01Z", 1000),
            ("1970-01-01T00:00:01", 1000),
        ],
    )
    def test_accepted_forms(self, value, expected):
        assert parse_timestamp(value) == expected

    @pytest.mark.parametrize("value", [True, 1.5, "yesterday", None])
    def test_rejected_forms(self, value):
        with pytest.raises(SchemaError):
            parse_timestamp(value)


class TestValidate:
    def test_l1_is_clean(self, l1):
        report = validate(l1)
        assert report.ok
        assert report.errors == () and report.warnings == ()

    def test_eventless_object_warns(self, l1):
        log = DbEventLog(
            events=l1.events,
            objects=l1.objects + (ObjectEntry(id="o3", obj_class="order"),),
            eo=l1.eo,
        )
        report = validate(log)
        assert report.ok
        assert [w.code for w in report.warnings] == ["object-no-events"]

    def test_objectless_event_warns(self, l1):
        log = DbEventLog(
            events=l1.events + (Event(id="e9", activity="Z", timestamp=900),),
            objects=l1.objects,
            eo=l1.eo,
        )
        report = validate(log)
        assert report.ok
        assert [w.code for w in report.warnings] == ["event-no-objects"]

    def test_duplicate_event_is_an_error(self, l1):
        log = DbEventLog(
            events=l1.events + (Event(id="e2", activity="B", timestamp=200),),
            objects=l1.objects,
            eo=l1.eo,
        )
        report = validate(log)
        assert not report.ok
        assert [e.code for e in report.errors] == ["duplicate-event-id"]

    def test_dangling_eo_pair_is_an_error(self, l1):
        log = DbEventLog(events=l1.events, objects=l1.objects, eo=l1.eo | {("e1", "oX")})
        report = validate(log)
        assert [e.code for e in report.errors] == ["dangling-object-ref"]


class TestRoundTrips:
    def test_jsonl_round_trip(self, l1):
        assert parse_jsonl(write_jsonl(l1)) == l1

    def test_xoc_round_trip(self, l1):
        assert parse_xoc(write_xoc(l1)) == l1

    def test_cross_format_equivalence(self, l1_xoc_bytes, l1_jsonl_bytes):
        assert parse_xoc(l1_xoc_bytes) == parse_jsonl(l1_jsonl_bytes)

    def test_jsonl_round_trip_preserves_attributes(self):
        doc = b'{"kind":"event","id":"e1","activity":"A","timestamp":1,"attrs":{"x":true}}'
        log = parse_jsonl(doc)
        assert parse_jsonl(write_jsonl(log)) == log

    def test_canonical_jsonl_is_deterministic(self, l1):
        assert write_jsonl(l1) == write_jsonl(l1)
        lines = write_jsonl(l1).decode().splitlines()
        kinds = [json.loads(ln)["kind"] for ln in lines]
        assert kinds == ["object"] * 2 + ["event"] * 4
