"""Business areas and their influence on a clustering suite.

A business area is one (dimension, value) pair; a dimension is a case
attribute, possibly lifted from event attributes. For an area ``a`` and a
cluster ``p`` out of ``n`` cases::

    density(a, p)       = n(p & a) / n(p)
    contribution(a, p)  = density(a, p) - n(a) / n
    area_score(a)       = sum over all clusters of all runs of
                          n(p) / n * max(contribution(a, p), 0) ** 2
    attribute_score(at) = sum of area_score over the values of ``at``

Counts stay integer until a single final division, so every contribution
is the correctly rounded value of the exact rational difference.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .clustering import ClusteringSuite
from .errors import AnalysisError, ConfigError
from .eventlog import EventLog

__all__ = [
    "MISSING",
    "LIFT_RULES",
    "LiftRule",
    "DimensionConfig",
    "DimensionTable",
    "derive_dimensions",
    "BusinessArea",
    "AreaClusterStat",
    "AreaContributionRow",
    "AttributeContributionRow",
    "density",
    "contribution",
    "business_area_contribution",
    "case_attribute_contribution",
    "InfluenceResult",
    "analyze",
    "rank_areas",
    "rank_attributes",
]

MISSING = "(empty)"
LIFT_RULES = ("first", "last", "distinct-concat")


# ---------------------------------------------------------------------------
# Dimensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftRule:
    """Turn an event attribute into a case-level dimension.

    Only events of ``activity`` are considered when it is given. The
    dimension is named ``<activity>.<attribute>.<rule>`` (activity part
    omitted when unscoped) unless ``name`` overrides it.
    """

    attribute: str
    rule: str = "first"
    activity: str | None = None
    name: str | None = None

    def __post_init__(self):
        if self.rule not in LIFT_RULES:
            raise ConfigError(f"unknown lifting rule {self.rule!r}; choose from {LIFT_RULES}")

    @property
    def dimension(self) -> str:
        if self.name:
            return self.name
        base = f"{self.activity}.{self.attribute}" if self.activity else self.attribute
        return f"{base}.{self.rule}"


@dataclass(frozen=True)
class DimensionConfig:
    """Which dimensions to analyze.

    ``case_attributes=None`` selects every case attribute in the log.
    ``include_empty=False`` keeps missing-value areas out of the ranked
    tables; they still count towards every denominator.
    """

    case_attributes: tuple[str, ...] | None = None
    lifts: tuple[LiftRule, ...] = ()
    include_empty: bool = True

    @classmethod
    def from_dict(cls, data: Mapping) -> "DimensionConfig":
        known = {"case_attributes", "lifts", "include_empty"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown dimension config keys: {sorted(extra)}")
        attrs = data.get("case_attributes")
        lifts = []
        for item in data.get("lifts", ()):
            try:
                lifts.append(LiftRule(**item))
            except TypeError as exc:
                raise ConfigError(f"bad lift rule {item!r}: {exc}") from None
        return cls(tuple(attrs) if attrs is not None else None, tuple(lifts),
                   bool(data.get("include_empty", True)))

    @classmethod
    def load(cls, path: str | os.PathLike) -> "DimensionConfig":
        """Read a JSON or TOML dimension config."""
        from ._config import load_mapping
        return cls.from_dict(load_mapping(path))


@dataclass(frozen=True, eq=False)
class DimensionTable:
    """Case-level dimension values aligned with ``case_ids``."""

    case_ids: tuple[str, ...]
    columns: Mapping[str, tuple[str, ...]]

    @property
    def dimensions(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def row(self, case_id: str) -> dict[str, str]:
        i = self.case_ids.index(case_id)
        return {d: vals[i] for d, vals in self.columns.items()}


def _lift(values: list[str], rule: str) -> str:
    if not values:
        return MISSING
    if rule == "first":
        return values[0]
    if rule == "last":
        return values[-1]
    return ",".join(dict.fromkeys(values))


def derive_dimensions(log: EventLog, config: DimensionConfig | None = None) -> DimensionTable:
    """Build the case-level dimension table.

    Cases lacking an attribute (or an empty string value) get :data:`MISSING`.
    """
    config = config or DimensionConfig()
    available = set(log.case_attribute_names())
    if config.case_attributes is None:
        names = sorted(available)
    else:
        missing = [a for a in config.case_attributes if a not in available]
        if missing:
            raise ConfigError(f"case attributes not found in log: {missing}")
        names = list(dict.fromkeys(config.case_attributes))
    columns: dict[str, tuple[str, ...]] = {}
    for name in names:
        vals = []
        for c in log.cases:
            v = c.attributes.get(name)
            vals.append(v.canonical if v is not None and v.canonical != "" else MISSING)
        columns[name] = tuple(vals)

    event_attrs = set(log.event_attribute_names())
    alphabet = set(log.activity_alphabet)
    for lift in config.lifts:
        if lift.attribute not in event_attrs:
            raise ConfigError(f"lifting rule references unknown event attribute {lift.attribute!r}")
        if lift.activity is not None and lift.activity not in alphabet:
            raise ConfigError(f"lifting rule references unknown activity {lift.activity!r}")
        dim = lift.dimension
        if dim in columns:
            raise ConfigError(f"dimension name {dim!r} is used twice")
        vals = []
        for c in log.cases:
            found = [e.attributes[lift.attribute].canonical for e in c.events
                     if (lift.activity is None or e.activity == lift.activity)
                     and lift.attribute in e.attributes
                     and e.attributes[lift.attribute].canonical != ""]
            vals.append(_lift(found, lift.rule))
        columns[dim] = tuple(vals)
    return DimensionTable(log.case_ids, columns)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BusinessArea:
    dimension: str
    value: str
    member_count: int
    members: frozenset = field(default=frozenset(), compare=False, repr=False)

    @property
    def label(self) -> str:
        return f"{self.dimension} = {self.value}"


@dataclass(frozen=True)
class AreaClusterStat:
    """Density and contribution of one area in one cluster of run ``k``.

    The raw counts are kept so that the contribution can be reconciled
    exactly with the two densities.
    """

    area: BusinessArea
    k: int
    cluster: int
    cluster_size: int
    n_cases: int
    in_cluster: int
    cluster_density: float
    total_density: float
    contribution: float


@dataclass(frozen=True)
class AreaContributionRow:
    area: BusinessArea
    business_area_contribution: float


@dataclass(frozen=True)
class AttributeContributionRow:
    attribute: str
    case_attribute_contribution: float
    distinct_values: int


def _ratio_diff(a_num, a_den, b_num, b_den):
    """``a_num/a_den - b_num/b_den`` with a single rounding step."""
    return (a_num * b_den - b_num * a_den) / (a_den * b_den)


def density(members, case_set) -> float:
    """Fraction of ``case_set`` that belongs to the area with ``members``."""
    case_set = set(case_set)
    if not case_set:
        raise AnalysisError("density of an empty case set is undefined")
    members = members.members if isinstance(members, BusinessArea) else members
    return len(case_set & set(members)) / len(case_set)


def contribution(members, cluster, all_cases) -> float:
    """Cluster density minus overall density of an area."""
    members = set(members.members if isinstance(members, BusinessArea) else members)
    cluster, all_cases = set(cluster), set(all_cases)
    if not cluster or not all_cases:
        raise AnalysisError("contribution needs non-empty cluster and case sets")
    if not cluster <= all_cases:
        raise AnalysisError("cluster is not a subset of the analyzed cases")
    return _ratio_diff(len(cluster & members), len(cluster), len(all_cases & members), len(all_cases))


def _check_suite(suite: ClusteringSuite, case_ids: Sequence[str]):
    if not len(suite.models):
        raise AnalysisError("clustering suite is empty")
    if tuple(suite.case_ids) != tuple(case_ids):
        raise AnalysisError("clustering suite does not cover the analyzed cases (fingerprint mismatch)")
    for m in suite.models:
        if len(m.assignments) != len(case_ids):
            raise AnalysisError(f"run k={m.k} has {len(m.assignments)} assignments for {len(case_ids)} cases")


def _area_score(joint: np.ndarray, n_a: np.ndarray, sizes: np.ndarray, n: int) -> np.ndarray:
    """Weighted squared positive contributions for one run; joint is (areas, k)."""
    n_p = sizes[None, :]
    contrib = (joint * n - n_a[:, None] * n_p) / (n_p * n)
    pos = np.maximum(contrib, 0.0)
    return (pos * pos * (sizes / n)[None, :]).sum(axis=1)


def business_area_contribution(area: BusinessArea, suite: ClusteringSuite) -> float:
    """Score of a single area over every cluster of every run in ``suite``."""
    ids = suite.case_ids
    _check_suite(suite, ids)
    members = area.members
    if not members <= set(ids):
        raise AnalysisError(f"area {area.label!r} has members outside the clustered cases")
    mask = np.fromiter((cid in members for cid in ids), dtype=bool, count=len(ids))
    n = len(ids)
    n_a = np.array([int(mask.sum())], dtype=np.int64)
    total = 0.0
    for m in suite.models:
        sizes = np.bincount(m.assignments, minlength=m.k).astype(np.int64)
        joint = np.bincount(m.assignments[mask], minlength=m.k).astype(np.int64)[None, :]
        total += float(_area_score(joint, n_a, sizes, n)[0])
    return total


def case_attribute_contribution(attribute: str, rows: Iterable[AreaContributionRow], suite=None) -> float:
    """Sum of area scores over the areas of ``attribute``."""
    return float(sum(r.business_area_contribution for r in rows if r.area.dimension == attribute))


def rank_areas(rows: Iterable[AreaContributionRow]) -> list[AreaContributionRow]:
    return sorted(rows, key=lambda r: (-r.business_area_contribution, r.area.dimension, r.area.value))


def rank_attributes(rows: Iterable[AttributeContributionRow]) -> list[AttributeContributionRow]:
    return sorted(rows, key=lambda r: (-r.case_attribute_contribution, r.attribute))


@dataclass(frozen=True, eq=False)
class InfluenceResult:
    """All measures of every area against every cluster of a suite.

    ``joint[r]`` is the (areas x k) matrix of n(cluster & area) for run ``r``.
    """

    case_ids: tuple[str, ...]
    areas: tuple[BusinessArea, ...]
    ks: tuple[int, ...]
    sizes: tuple[np.ndarray, ...]
    joint: tuple[np.ndarray, ...]
    area_counts: np.ndarray
    scores: np.ndarray
    include_empty: bool = True

    @property
    def n_cases(self) -> int:
        return len(self.case_ids)

    @property
    def dimensions(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a.dimension for a in self.areas))

    def _ranked(self, area: BusinessArea) -> bool:
        return self.include_empty or area.value != MISSING

    def stat(self, run: int, cluster: int, area_index: int) -> AreaClusterStat:
        n = self.n_cases
        n_p = int(self.sizes[run][cluster])
        n_pa = int(self.joint[run][area_index, cluster])
        n_a = int(self.area_counts[area_index])
        return AreaClusterStat(
            self.areas[area_index], self.ks[run], cluster, n_p, n, n_pa,
            n_pa / n_p, n_a / n, _ratio_diff(n_pa, n_p, n_a, n))

    def contributions(self, run: int) -> np.ndarray:
        """(areas x k) contribution matrix of run ``run``."""
        n = self.n_cases
        n_p = self.sizes[run][None, :]
        return (self.joint[run] * n - self.area_counts[:, None] * n_p) / (n_p * n)

    def cluster_table(self, run: int, cluster: int, top_n: int | None = 5) -> list[AreaClusterStat]:
        """Areas of one cluster ordered by contribution, descending."""
        col = self.contributions(run)[:, cluster]
        order = sorted((i for i in range(len(self.areas)) if self._ranked(self.areas[i])),
                       key=lambda i: (-col[i], self.areas[i].dimension, self.areas[i].value))
        if top_n is not None:
            order = order[:top_n]
        return [self.stat(run, cluster, i) for i in order]

    def area_rows(self, ranked_only: bool = False) -> list[AreaContributionRow]:
        rows = [AreaContributionRow(a, float(s)) for a, s in zip(self.areas, self.scores)]
        if ranked_only:
            rows = [r for r in rows if self._ranked(r.area)]
        return rows

    def attribute_rows(self) -> list[AttributeContributionRow]:
        """One row per dimension; sums include missing-value areas."""
        rows = self.area_rows()
        out = []
        for dim in self.dimensions:
            mine = [r for r in rows if r.area.dimension == dim]
            out.append(AttributeContributionRow(dim, case_attribute_contribution(dim, mine), len(mine)))
        return out


def analyze(table: DimensionTable, suite: ClusteringSuite, include_empty: bool = True) -> InfluenceResult:
    """Compute every area's densities, contributions and score against ``suite``."""
    ids = table.case_ids
    n = len(ids)
    if n == 0:
        raise AnalysisError("no cases to analyze")
    _check_suite(suite, ids)
    areas: list[BusinessArea] = []
    codes_by_dim = []
    for dim, vals in table.columns.items():
        uniq, codes = np.unique(np.asarray(vals, dtype=object), return_inverse=True)
        codes = codes.astype(np.int64).ravel()
        counts = np.bincount(codes, minlength=len(uniq))
        groups = np.split(np.argsort(codes, kind="stable"), np.cumsum(counts)[:-1])
        for v, idx in zip(uniq, groups):
            areas.append(BusinessArea(dim, str(v), len(idx), frozenset(ids[i] for i in idx)))
        codes_by_dim.append((codes, len(uniq)))
    area_counts = np.array([a.member_count for a in areas], dtype=np.int64)

    sizes, joints = [], []
    scores = np.zeros(len(areas), dtype=np.float64)
    for m in suite.models:
        labels = np.asarray(m.assignments, dtype=np.int64)
        s = np.bincount(labels, minlength=m.k).astype(np.int64)
        if (s == 0).any():
            raise AnalysisError(f"run k={m.k} has an empty cluster")
        blocks = [np.bincount(codes * m.k + labels, minlength=nv * m.k).reshape(nv, m.k)
                  for codes, nv in codes_by_dim]
        joint = np.vstack(blocks).astype(np.int64) if blocks else np.zeros((0, m.k), dtype=np.int64)
        sizes.append(s)
        joints.append(joint)
        scores += _area_score(joint, area_counts, s, n)
    return InfluenceResult(tuple(ids), tuple(areas), tuple(m.k for m in suite.models),
                           tuple(sizes), tuple(joints), area_counts, scores, include_empty)
