import pytest

from flowareas import Case, Event, EventLog

ACCEPTANCE_LINES = []


def make_log(traces, attrs=None):
    """Log from activity sequences; ``attrs`` is an optional list of case attribute dicts."""
    attrs = attrs or [{} for _ in traces]
    cases = [Case(f"c{i}", [Event(a) for a in seq], at) for i, (seq, at) in enumerate(zip(traces, attrs))]
    return EventLog(cases)


@pytest.fixture
def tiny_log():
    return make_log([("A", "B", "A"), ("A", "C"), ("B",)],
                    [{"type": "x"}, {"type": "y"}, {"type": "x"}])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
