"""Event log model plus XES / CSV ingestion and seeded case sampling.

Events inside a case are kept in canonical order: ascending timestamp, with
ties and untimed events falling back to document order. An untimed event
inherits the timestamp of the nearest timed event before it, so it stays
directly behind its predecessor.
"""
from __future__ import annotations

import csv
import gzip
import io
import os
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, ParseError

__all__ = [
    "AttributeValue",
    "Event",
    "Case",
    "EventLog",
    "CsvMapping",
    "parse_xes",
    "parse_csv",
    "write_csv",
    "sample_cases",
    "canonical_instant",
    "parse_instant",
]

ACTIVITY_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"
XES_KINDS = ("string", "date", "int", "float", "boolean", "id")
# XES container kinds; their children are not flattened
XES_CONTAINERS = ("list", "container", "values")


def parse_instant(text: str) -> datetime:
    """Parse an ISO-8601 instant; naive values are taken as UTC."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def canonical_instant(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class AttributeValue:
    """A typed attribute value with a stable, locale-independent string form.

    ``kind`` is one of ``string``, ``integer``, ``decimal``, ``boolean`` or
    ``instant``. Business-area identity uses :attr:`canonical` only.
    """

    kind: str
    value: object

    def __post_init__(self):
        if self.kind not in ("string", "integer", "decimal", "boolean", "instant"):
            raise ValueError(f"unknown attribute kind {self.kind!r}")

    @property
    def canonical(self) -> str:
        if self.kind == "boolean":
            return "TRUE" if self.value else "FALSE"
        if self.kind == "integer":
            return str(int(self.value))
        if self.kind == "decimal":
            return repr(float(self.value))
        if self.kind == "instant":
            return canonical_instant(self.value)
        return str(self.value)

    def __str__(self):
        return self.canonical

    @classmethod
    def of(cls, value) -> "AttributeValue":
        """Wrap a plain Python value, inferring its kind."""
        if isinstance(value, AttributeValue):
            return value
        if isinstance(value, bool):
            return cls("boolean", value)
        if isinstance(value, (int, np.integer)):
            return cls("integer", int(value))
        if isinstance(value, (float, np.floating)):
            return cls("decimal", float(value))
        if isinstance(value, datetime):
            return cls("instant", value)
        return cls("string", str(value))


def _attr_map(attributes) -> dict[str, AttributeValue]:
    if not attributes:
        return {}
    return {str(k): AttributeValue.of(v) for k, v in attributes.items()}


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: datetime | None = None
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.activity:
            raise ValueError("event activity label must be non-empty")
        object.__setattr__(self, "attributes", _attr_map(self.attributes))
        if self.timestamp is not None and self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))


@dataclass(frozen=True)
class Case:
    id: str
    events: tuple[Event, ...]
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "attributes", _attr_map(self.attributes))

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)

    def __len__(self):
        return len(self.events)


def canonical_order(events: Sequence[Event]) -> list[Event]:
    """Stable-sort events by timestamp; untimed events trail their predecessor."""
    keys = []
    last = None
    for e in events:
        if e.timestamp is not None:
            last = e.timestamp
        keys.append(last)
    if all(k is None for k in keys):
        return list(events)
    floor = datetime.min.replace(tzinfo=timezone.utc)
    order = sorted(range(len(events)), key=lambda i: keys[i] or floor)
    return [events[i] for i in order]


@dataclass(frozen=True)
class EventLog:
    """An immutable collection of cases.

    ``activity_alphabet`` is the lexicographically sorted set of activity
    labels that occur in the cases. ``provenance`` records the source and,
    after sampling, the seed and the original size.
    """

    cases: tuple[Case, ...]
    provenance: Mapping[str, object] = field(default_factory=dict)
    activity_alphabet: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        object.__setattr__(self, "provenance", dict(self.provenance))
        seen = set()
        for c in self.cases:
            if c.id in seen:
                raise ValueError(f"duplicate case id {c.id!r}")
            seen.add(c.id)
        labels = {e.activity for c in self.cases for e in c.events}
        object.__setattr__(self, "activity_alphabet", tuple(sorted(labels)))

    def __len__(self):
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    @property
    def case_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.cases)

    @property
    def n_events(self) -> int:
        return sum(len(c.events) for c in self.cases)

    def case_attribute_names(self) -> tuple[str, ...]:
        return tuple(sorted({k for c in self.cases for k in c.attributes}))

    def event_attribute_names(self) -> tuple[str, ...]:
        return tuple(sorted({k for c in self.cases for e in c.events for k in e.attributes}))


def _finish_cases(raw_cases, strict, source) -> list[Case]:
    """Drop empty traces, de-duplicate ids, order events."""
    cases = []
    ids = {}
    empty = 0
    for case_id, attributes, events in raw_cases:
        if not events:
            if strict:
                raise ParseError(f"case {case_id!r} has no events")
            empty += 1
            continue
        if case_id in ids:
            ids[case_id] += 1
            new_id = f"{case_id}#{ids[case_id]}"
            while new_id in ids:
                ids[case_id] += 1
                new_id = f"{case_id}#{ids[case_id]}"
            warnings.warn(f"duplicate case id {case_id!r} renamed to {new_id!r}", stacklevel=3)
            case_id = new_id
        ids[case_id] = 1
        cases.append(Case(case_id, tuple(canonical_order(events)), attributes))
    if empty:
        warnings.warn(f"dropped {empty} empty case(s) from {source}", stacklevel=3)
    return cases


# ---------------------------------------------------------------------------
# XES
# ---------------------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_value(kind: str, key: str, text: str | None, strict: bool) -> AttributeValue:
    if text is None:
        text = ""
    try:
        if kind == "int":
            return AttributeValue("integer", int(text))
        if kind == "float":
            return AttributeValue("decimal", float(text))
        if kind == "boolean":
            low = text.strip().lower()
            if low not in ("true", "false"):
                raise ValueError(text)
            return AttributeValue("boolean", low == "true")
        if kind == "date":
            return AttributeValue("instant", parse_instant(text))
    except ValueError:
        if strict:
            raise ParseError(f"bad {kind} value {text!r} for key {key!r}") from None
        warnings.warn(f"bad {kind} value {text!r} for key {key!r}; kept as string", stacklevel=4)
    return AttributeValue("string", text)


def _open_binary(source):
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if path.endswith(".gz"):
            return gzip.open(path, "rb"), True
        return open(path, "rb"), True
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source), True
    return source, False


def parse_xes(source, strict: bool = False) -> EventLog:
    """Read an XES document into an :class:`EventLog`.

    ``source`` may be a path (``.gz`` is decompressed), raw bytes or a binary
    file object. In lenient mode, events without ``concept:name`` are dropped
    with a warning; in strict mode they abort the parse.
    """
    stream, owned = _open_binary(source)
    label = os.fspath(source) if isinstance(source, (str, os.PathLike)) else "<stream>"
    raw_cases = []
    unknown_kinds = set()
    stack: list[str] = []
    trace_attrs: dict | None = None
    trace_events: list | None = None
    event_attrs: dict | None = None
    n_traces = 0
    dropped = 0
    try:
        for ev, elem in ET.iterparse(stream, events=("start", "end")):
            tag = _local(elem.tag)
            if ev == "start":
                stack.append(tag)
                if tag == "trace" and len(stack) == 2:
                    trace_attrs, trace_events = {}, []
                elif tag == "event" and len(stack) == 3 and stack[1] == "trace":
                    event_attrs = {}
                continue
            stack.pop()
            parent = stack[-1] if stack else None
            depth = len(stack)
            if tag == "event" and event_attrs is not None and depth == 2:
                activity = event_attrs.pop(ACTIVITY_KEY, None)
                ts = event_attrs.pop(TIMESTAMP_KEY, None)
                if activity is None or not activity.canonical:
                    if strict:
                        raise ParseError(f"event without {ACTIVITY_KEY!r} in trace #{n_traces + 1}")
                    dropped += 1
                else:
                    if ts is not None and ts.kind != "instant":
                        event_attrs[TIMESTAMP_KEY] = ts
                        ts = None
                    trace_events.append(Event(activity.canonical, ts.value if ts else None, event_attrs))
                event_attrs = None
                elem.clear()
            elif tag == "trace" and trace_attrs is not None and depth == 1:
                n_traces += 1
                name = trace_attrs.pop(ACTIVITY_KEY, None)
                case_id = name.canonical if name is not None else f"case_{n_traces}"
                raw_cases.append((case_id, trace_attrs, trace_events))
                trace_attrs = trace_events = None
                elem.clear()
            elif parent in ("event", "trace") and "key" in elem.attrib:
                if parent == "event" and (event_attrs is None or depth != 3):
                    continue
                if parent == "trace" and (trace_attrs is None or depth != 2):
                    continue
                if tag in XES_CONTAINERS:
                    continue
                if tag not in XES_KINDS:
                    unknown_kinds.add(tag)
                    kind = "string"
                else:
                    kind = tag
                value = _xes_value(kind, elem.attrib["key"], elem.attrib.get("value"), strict)
                target = event_attrs if parent == "event" else trace_attrs
                target[elem.attrib["key"]] = value
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(f"malformed XML in {label}", line, col + 1) from None
    finally:
        if owned:
            stream.close()
    if unknown_kinds:
        warnings.warn(f"unknown XES attribute kinds kept as strings: {sorted(unknown_kinds)}", stacklevel=2)
    if dropped:
        warnings.warn(f"dropped {dropped} event(s) without {ACTIVITY_KEY!r}", stacklevel=2)
    cases = _finish_cases(raw_cases, strict, label)
    return EventLog(cases, {"source": label, "format": "xes", "original_size": len(cases)})


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CsvMapping:
    """Column roles for CSV ingestion.

    Columns not named explicitly are case-level when they start with
    ``case_prefix`` (the prefix is stripped) and event-level otherwise.
    ``time_format`` is a ``strptime`` pattern; ``None`` means ISO-8601.
    """

    case_col: str = "case_id"
    activity_col: str = "activity"
    time_col: str | None = None
    time_format: str | None = None
    case_attributes: tuple[str, ...] | None = None
    event_attributes: tuple[str, ...] | None = None
    case_prefix: str = "case:"


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8-sig", newline=""), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8-sig"), newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline=""), False


def parse_csv(source, mapping: CsvMapping | None = None, strict: bool = False) -> EventLog:
    """Read a one-row-per-event CSV file into an :class:`EventLog`.

    Cases appear in order of first occurrence; events keep file order unless
    a timestamp column is mapped.
    """
    mapping = mapping or CsvMapping()
    stream, owned = _open_text(source)
    label = os.fspath(source) if isinstance(source, (str, os.PathLike)) else "<stream>"
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{label}: CSV has no header row") from None
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise ConfigError(f"duplicate CSV header columns: {dupes}")
        index = {h: i for i, h in enumerate(header)}
        for role, col in (("case id", mapping.case_col), ("activity", mapping.activity_col),
                          ("timestamp", mapping.time_col)):
            if col is not None and col not in index:
                raise ConfigError(f"{role} column {col!r} not in CSV header {header}")
        reserved = {mapping.case_col, mapping.activity_col, mapping.time_col}
        explicit_case = set(mapping.case_attributes or ())
        explicit_event = set(mapping.event_attributes or ())
        for col in sorted(explicit_case | explicit_event):
            if col not in index:
                raise ConfigError(f"attribute column {col!r} not in CSV header")
        case_cols, event_cols = [], []
        for h in header:
            if h in reserved:
                continue
            if h in explicit_case:
                case_cols.append((index[h], h))
            elif h in explicit_event:
                event_cols.append((index[h], h))
            elif mapping.case_prefix and h.startswith(mapping.case_prefix):
                case_cols.append((index[h], h[len(mapping.case_prefix):]))
            else:
                event_cols.append((index[h], h))

        i_case, i_act = index[mapping.case_col], index[mapping.activity_col]
        i_time = index[mapping.time_col] if mapping.time_col is not None else None
        grouped: dict[str, tuple[dict, list]] = {}
        bad_rows = 0
        for row in reader:
            lineno = reader.line_num
            if not row or all(not v for v in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"row has {len(row)} fields, header has {len(header)}", lineno, 1)
            case_id, activity = row[i_case], row[i_act]
            if not case_id or not activity:
                if strict:
                    raise ParseError("row lacks case id or activity", lineno, 1)
                bad_rows += 1
                continue
            ts = None
            if i_time is not None and row[i_time]:
                try:
                    if mapping.time_format:
                        ts = datetime.strptime(row[i_time], mapping.time_format)
                        ts = ts.replace(tzinfo=timezone.utc) if ts.tzinfo is None else ts.astimezone(timezone.utc)
                    else:
                        ts = parse_instant(row[i_time])
                except ValueError:
                    if strict:
                        raise ParseError(f"unparseable timestamp {row[i_time]!r}", lineno, i_time + 1) from None
                    ts = None
            attrs, events = grouped.setdefault(case_id, ({}, []))
            for i, name in case_cols:
                if row[i] and name not in attrs:
                    attrs[name] = AttributeValue("string", row[i])
            ev_attrs = {name: AttributeValue("string", row[i]) for i, name in event_cols if row[i]}
            events.append(Event(activity, ts, ev_attrs))
    finally:
        if owned:
            stream.close()
    if bad_rows:
        warnings.warn(f"skipped {bad_rows} row(s) without case id or activity", stacklevel=2)
    cases = _finish_cases(((cid, a, e) for cid, (a, e) in grouped.items()), strict, label)
    return EventLog(cases, {"source": label, "format": "csv", "original_size": len(cases)})


def write_csv(log: EventLog, dest: IO[str] | str | os.PathLike,
              mapping: CsvMapping | None = None) -> None:
    """Write ``log`` as one-row-per-event CSV that :func:`parse_csv` reads back.

    Case attributes get the mapping's ``case_prefix``; the timestamp column is
    named ``timestamp`` unless the mapping names one.
    """
    mapping = mapping or CsvMapping()
    time_col = mapping.time_col or "timestamp"
    case_names = log.case_attribute_names()
    event_names = log.event_attribute_names()
    header = [mapping.case_col, mapping.activity_col, time_col]
    header += [mapping.case_prefix + n for n in case_names] + list(event_names)
    if len(set(header)) != len(header):
        raise ConfigError("attribute names collide with reserved CSV columns")

    def rows() -> Iterable[list[str]]:
        for case in log.cases:
            case_part = [case.attributes[n].canonical if n in case.attributes else "" for n in case_names]
            for e in case.events:
                ts = canonical_instant(e.timestamp) if e.timestamp is not None else ""
                ev_part = [e.attributes[n].canonical if n in e.attributes else "" for n in event_names]
                yield [case.id, e.activity, ts, *case_part, *ev_part]

    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows())
    else:
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows())


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_cases(log: EventLog, n: int, seed: int) -> EventLog:
    """Uniform sample of ``n`` cases without replacement.

    The log is returned unchanged when it has at most ``n`` cases. Sampled
    cases keep their original relative order.
    """
    if n < 1:
        raise ConfigError(f"sample size must be >= 1, got {n}")
    if n >= len(log):
        return log
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(log), size=n, replace=False))
    prov = dict(log.provenance)
    prov.update(original_size=len(log), sample_size=n, sample_seed=seed)
    return EventLog([log.cases[i] for i in idx], prov)
