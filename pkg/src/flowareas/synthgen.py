"""Synthetic event logs with planted business-area effects.

Every case starts from ``base_sequence``. Effects whose (dimension, value)
matches the case's drawn attributes edit the sequence in the order they are
listed; afterwards, with probability ``noise_rate``, one uniformly chosen
random edit is applied.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .eventlog import Case, Event, EventLog

__all__ = ["EDIT_KINDS", "Dimension", "Edit", "Effect", "SynthSpec", "generate", "apply_edit"]

EDIT_KINDS = ("insert", "remove", "swap", "repeat")
CLOCK_START = datetime(2020, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class Dimension:
    name: str
    values: tuple[str, ...]
    probabilities: tuple[float, ...] | None = None  # None means uniform

    @property
    def weights(self) -> np.ndarray:
        if self.probabilities is None:
            return np.full(len(self.values), 1.0 / len(self.values))
        return np.asarray(self.probabilities, dtype=float)


@dataclass(frozen=True)
class Edit:
    """One sequence edit.

    ``insert`` puts ``activity`` at ``position`` (clamped to the current
    length). ``remove`` deletes every occurrence of ``activity``. ``swap``
    exchanges the first occurrence of ``activity`` with its successor.
    ``repeat`` duplicates the first occurrence in place.
    """

    kind: str
    activity: str
    position: int | None = None


@dataclass(frozen=True)
class Effect:
    dimension: str
    value: str
    edit: Edit


@dataclass(frozen=True)
class SynthSpec:
    n_cases: int
    base_sequence: tuple[str, ...]
    dimensions: tuple[Dimension, ...] = ()
    effects: tuple[Effect, ...] = ()
    noise_rate: float = 0.0
    seed: int = 0

    def validate(self) -> "SynthSpec":
        if not isinstance(self.n_cases, int) or self.n_cases < 1:
            raise ConfigError(f"n_cases must be a positive integer, got {self.n_cases!r}")
        if not self.base_sequence or not all(isinstance(a, str) and a for a in self.base_sequence):
            raise ConfigError("base_sequence must be a non-empty list of non-empty labels")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ConfigError(f"noise_rate must be in [0, 1], got {self.noise_rate}")
        dims = {}
        for d in self.dimensions:
            if d.name in dims:
                raise ConfigError(f"dimension {d.name!r} defined twice")
            if not d.values or len(set(d.values)) != len(d.values):
                raise ConfigError(f"dimension {d.name!r} needs distinct values")
            if d.probabilities is not None:
                if len(d.probabilities) != len(d.values):
                    raise ConfigError(f"dimension {d.name!r}: one probability per value required")
                if any(not 0.0 <= p <= 1.0 for p in d.probabilities):
                    raise ConfigError(f"dimension {d.name!r}: probabilities must lie in [0, 1]")
                if not math.isclose(sum(d.probabilities), 1.0, abs_tol=1e-9):
                    raise ConfigError(f"dimension {d.name!r}: probabilities sum to {sum(d.probabilities)}")
            dims[d.name] = set(d.values)
        labels = set(self.base_sequence) | {e.edit.activity for e in self.effects if e.edit.kind == "insert"}
        for e in self.effects:
            if e.dimension not in dims or e.value not in dims[e.dimension]:
                raise ConfigError(f"effect references unknown area {e.dimension}={e.value}")
            if e.edit.kind not in EDIT_KINDS:
                raise ConfigError(f"unknown edit kind {e.edit.kind!r}; choose from {EDIT_KINDS}")
            if not e.edit.activity:
                raise ConfigError("edit needs an activity label")
            if e.edit.kind == "insert":
                pos = e.edit.position
                if pos is None or not 0 <= pos <= len(self.base_sequence):
                    raise ConfigError(f"insert position {pos!r} outside 0..{len(self.base_sequence)}")
            elif e.edit.activity not in labels:
                raise ConfigError(f"edit references unknown activity {e.edit.activity!r}")
        return self

    @property
    def alphabet(self) -> tuple[str, ...]:
        labels = set(self.base_sequence)
        labels |= {e.edit.activity for e in self.effects if e.edit.kind == "insert"}
        return tuple(sorted(labels))

    @classmethod
    def from_dict(cls, data: Mapping) -> "SynthSpec":
        try:
            dims = tuple(
                Dimension(d["name"], tuple(str(v) for v in d["values"]),
                          tuple(float(p) for p in d["probabilities"]) if d.get("probabilities") is not None else None)
                for d in data.get("dimensions", ()))
            effects = tuple(
                Effect(e["dimension"], str(e["value"]),
                       Edit(e["edit"]["kind"], e["edit"]["activity"], e["edit"].get("position")))
                for e in data.get("effects", ()))
            spec = cls(n_cases=data["n_cases"], base_sequence=tuple(data["base_sequence"]),
                       dimensions=dims, effects=effects,
                       noise_rate=float(data.get("noise_rate", 0.0)), seed=int(data.get("seed", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid synth spec: {exc!r}") from None
        return spec.validate()

    @classmethod
    def load(cls, path: str | os.PathLike) -> "SynthSpec":
        from ._config import load_mapping
        return cls.from_dict(load_mapping(path))


def apply_edit(seq: list[str], edit: Edit) -> list[str]:
    """Apply ``edit`` to a copy of ``seq``; edits on absent labels are no-ops."""
    seq = list(seq)
    if edit.kind == "insert":
        seq.insert(min(edit.position or 0, len(seq)), edit.activity)
    elif edit.kind == "remove":
        seq = [a for a in seq if a != edit.activity]
    elif edit.activity in seq:
        i = seq.index(edit.activity)
        if edit.kind == "swap":
            if i + 1 < len(seq):
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
        elif edit.kind == "repeat":
            seq.insert(i + 1, edit.activity)
        else:
            raise ConfigError(f"unknown edit kind {edit.kind!r}")
    return seq


def _noise_edit(seq: list[str], alphabet, rng) -> list[str]:
    kind = EDIT_KINDS[rng.integers(len(EDIT_KINDS))]
    seq = list(seq)
    if kind == "insert":
        seq.insert(int(rng.integers(len(seq) + 1)), alphabet[rng.integers(len(alphabet))])
    elif kind == "remove":
        if len(seq) > 1:
            del seq[int(rng.integers(len(seq)))]
    elif kind == "swap":
        if len(seq) > 1:
            i = int(rng.integers(len(seq) - 1))
            seq[i], seq[i + 1] = seq[i + 1], seq[i]
    else:
        i = int(rng.integers(len(seq)))
        seq.insert(i + 1, seq[i])
    return seq


def generate(spec: SynthSpec) -> EventLog:
    """Draw ``spec.n_cases`` cases; deterministic for a given ``spec.seed``.

    Events get a synthetic monotone clock: case ``i`` starts ``i`` hours after
    2020-01-01T00:00Z and its events are one minute apart.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    alphabet = spec.alphabet
    width = len(str(spec.n_cases))
    weights = [d.weights for d in spec.dimensions]
    cases = []
    for i in range(spec.n_cases):
        drawn = {d.name: d.values[rng.choice(len(d.values), p=w)] for d, w in zip(spec.dimensions, weights)}
        seq = list(spec.base_sequence)
        for eff in spec.effects:
            if drawn[eff.dimension] == eff.value:
                seq = apply_edit(seq, eff.edit)
        if rng.random() < spec.noise_rate and seq:
            seq = _noise_edit(seq, alphabet, rng)
        if not seq:
            raise ConfigError(f"effects leave case {i + 1} without events")
        start = CLOCK_START + timedelta(hours=i)
        events = [Event(a, start + timedelta(minutes=j)) for j, a in enumerate(seq)]
        cases.append(Case(f"case_{i + 1:0{width}d}", events, drawn))
    return EventLog(cases, {"source": "synthgen", "format": "synthetic", "seed": spec.seed,
                            "original_size": spec.n_cases})
