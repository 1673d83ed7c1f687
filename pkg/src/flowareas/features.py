"""Per-case flow profiles and their binary encoding.

Activity profile values 0/1/2 ("two or more") are encoded with two
thermometer bits ``[v >= 1], [v >= 2]`` so that the Hamming distance between
two rows counts a 0 vs 2 difference twice. Each directly-follows transition
observed anywhere in the log (including the synthetic START and END
endpoints) becomes one presence bit.
"""
from __future__ import annotations

import csv
import hashlib
import os
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import AnalysisError, ConfigError
from .eventlog import Case, EventLog

__all__ = [
    "START",
    "END",
    "PROFILES",
    "activity_profile",
    "transition_profile",
    "FeatureMatrix",
    "encode",
    "column_bound",
]

# Both endpoints are the empty string, which no activity label can be; the
# position inside a (source, target) pair tells them apart.
START = ""
END = ""
PROFILES = ("activity", "transition")


def activity_profile(case: Case, alphabet: Sequence[str]) -> np.ndarray:
    """Occurrence level of every alphabet label in ``case``: 0, 1 or 2 (two or more)."""
    counts = Counter(e.activity for e in case.events)
    pos = {a: i for i, a in enumerate(alphabet)}
    out = np.zeros(len(alphabet), dtype=np.uint8)
    for label, n in counts.items():
        if label not in pos:
            raise AnalysisError(f"activity {label!r} of case {case.id!r} is not in the alphabet")
        out[pos[label]] = min(n, 2)
    return out


def transition_profile(case: Case) -> frozenset[tuple[str, str]]:
    """Set of directly-follows pairs, including START->first and last->END."""
    acts = case.activities
    if not acts:
        raise AnalysisError(f"case {case.id!r} has no events")
    path = (START, *acts, END)
    return frozenset(zip(path[:-1], path[1:]))


def _endpoint(x: str, default: str) -> str:
    return x if x else default


def column_bound(n_activities: int) -> int:
    """Upper bound on the column count for an alphabet of the given size."""
    return (n_activities + 1) ** 2 + 2 * n_activities


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Binary flow features, one row per case.

    ``columns`` holds one descriptor per column: ``("act", label, 1)`` and
    ``("act", label, 2)`` for the thermometer bits, ``("tr", src, dst)`` for a
    transition, with START/END as the empty string.
    """

    rows: np.ndarray
    columns: tuple[tuple, ...]
    case_ids: tuple[str, ...]
    alphabet: tuple[str, ...]

    def __post_init__(self):
        self.rows.setflags(write=False)

    @property
    def shape(self):
        return self.rows.shape

    @property
    def column_names(self) -> list[str]:
        names = []
        for col in self.columns:
            if col[0] == "act":
                names.append(f"act:{col[1]}:ge{col[2]}")
            else:
                names.append(f"tr:{_endpoint(col[1], 'START')}→{_endpoint(col[2], 'END')}")
        return names

    @property
    def fingerprint(self) -> str:
        """SHA-256 over rows, column catalog and case ids."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.rows, dtype=np.uint8).tobytes())
        h.update(repr(self.rows.shape).encode())
        h.update("\x1f".join(self.column_names).encode())
        h.update(b"\x1e")
        h.update("\x1f".join(self.case_ids).encode())
        return h.hexdigest()

    def decode(self) -> list[tuple[np.ndarray | None, frozenset | None]]:
        """Recover (activity profile, transition set) per row.

        A profile kind that was not encoded is returned as ``None``.
        """
        act_cols = {}
        tr_cols = []
        for j, col in enumerate(self.columns):
            if col[0] == "act":
                act_cols.setdefault(col[1], [None, None])[col[2] - 1] = j
            else:
                tr_cols.append((j, (col[1], col[2])))
        out = []
        for row in self.rows:
            prof = None
            if act_cols:
                prof = np.array([int(row[act_cols[a][0]]) + int(row[act_cols[a][1]])
                                 for a in self.alphabet], dtype=np.uint8)
            trans = frozenset(p for j, p in tr_cols if row[j]) if tr_cols else None
            out.append((prof, trans))
        return out

    def to_csv(self, dest: IO[str] | str | os.PathLike) -> None:
        """Dump as CSV: ``case_id`` then one column per descriptor."""
        def _write(fh):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["case_id", *self.column_names])
            for cid, row in zip(self.case_ids, self.rows):
                w.writerow([cid, *row.tolist()])
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                _write(fh)
        else:
            _write(dest)


def encode(log: EventLog, profiles: Iterable[str] = PROFILES) -> FeatureMatrix:
    """Build the binary feature matrix of ``log``.

    Column order: activity bits (labels sorted, ge1 before ge2), then
    transitions sorted by (source, target) with START sorting first and END
    sorting first among targets.
    """
    profiles = tuple(dict.fromkeys(profiles))
    if not profiles:
        raise ConfigError("at least one profile must be selected")
    unknown = set(profiles) - set(PROFILES)
    if unknown:
        raise ConfigError(f"unknown profiles {sorted(unknown)}; choose from {PROFILES}")
    use_act = "activity" in profiles
    use_tr = "transition" in profiles

    alphabet = log.activity_alphabet
    n = len(log)
    blocks = []
    columns: list[tuple] = []
    if use_act:
        levels = np.zeros((n, len(alphabet)), dtype=np.uint8)
        for i, case in enumerate(log.cases):
            levels[i] = activity_profile(case, alphabet)
        bits = np.empty((n, 2 * len(alphabet)), dtype=np.uint8)
        bits[:, 0::2] = levels >= 1
        bits[:, 1::2] = levels >= 2
        blocks.append(bits)
        for a in alphabet:
            columns += [("act", a, 1), ("act", a, 2)]
    if use_tr:
        per_case = [transition_profile(c) for c in log.cases]
        observed = sorted(set().union(*per_case)) if per_case else []
        pos = {p: j for j, p in enumerate(observed)}
        tr = np.zeros((n, len(observed)), dtype=np.uint8)
        for i, s in enumerate(per_case):
            tr[i, [pos[p] for p in s]] = 1
        blocks.append(tr)
        columns += [("tr", a, b) for a, b in observed]
    rows = np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=np.uint8)
    return FeatureMatrix(rows, tuple(columns), log.case_ids, alphabet)
