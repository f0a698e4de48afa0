import pathlib

import pytest

from starstar import DbEventLog, Event, ObjectEntry, parse_jsonl

import oracle

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

_criterion_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        name = getattr(item.function, "_criterion", None)
        if name:
            _criterion_results[name] = report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_results:
        terminalreporter.section("acceptance criteria")
        for name, passed in _criterion_results.items():
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}: {name}")


def engine_log(raw: oracle.RawLog) -> DbEventLog:
    """Build the engine's log type from the oracle's primitive representation."""
    return DbEventLog(
        events=tuple(Event(id=eid, activity=act, timestamp=ts) for eid, act, ts in raw.events),
        objects=tuple(ObjectEntry(id=oid, obj_class=cls) for oid, cls in raw.objects),
        eo=frozenset(raw.eo),
    )


@pytest.fixture(scope="session")
def l1_jsonl_bytes() -> bytes:
    return (FIXTURES / "l1.jsonl").read_bytes()


@pytest.fixture(scope="session")
def l1_xoc_bytes() -> bytes:
    return (FIXTURES / "l1.xoc").read_bytes()


@pytest.fixture(scope="session")
def l1(l1_jsonl_bytes) -> DbEventLog:
    return parse_jsonl(l1_jsonl_bytes)
