"""Analysis report assembly and rendering (Markdown, CSV, JSON)."""
from __future__ import annotations

import csv
import io
import json
import os
from collections import Counter
from dataclasses import dataclass, field

from .clustering import ClusteringSuite
from .errors import AnalysisError, ConfigError
from .eventlog import EventLog
from .features import END, START, FeatureMatrix
from .influence import InfluenceResult, rank_areas, rank_attributes

__all__ = ["AnalysisReport", "activity_table", "transition_summary", "build_report",
           "render", "write_report", "FORMATS"]

FORMATS = {"markdown": "md", "md": "md", "csv": "csv", "json": "json"}
SCORE_CONVENTION = ("area scores sum weighted squared positive contributions over every "
                    "cluster of every run, without normalizing by the number of runs")


def activity_table(log: EventLog) -> list[dict]:
    """Per activity: cases containing it and total occurrences."""
    unique = Counter()
    total = Counter()
    for case in log.cases:
        acts = case.activities
        total.update(acts)
        unique.update(set(acts))
    rows = [{"activity": a, "unique_count": unique[a], "total_count": total[a]}
            for a in log.activity_alphabet]
    rows.sort(key=lambda r: (-r["unique_count"], -r["total_count"], r["activity"]))
    return rows


def transition_summary(log: EventLog) -> dict:
    """Distinct directly-follows transitions, split into start / end / inner."""
    pairs = set()
    for case in log.cases:
        path = (START, *case.activities, END)
        pairs.update(zip(path[:-1], path[1:]))
    start = sum(1 for a, _ in pairs if a == START)
    end = sum(1 for _, b in pairs if b == END)
    return {"total": len(pairs), "start": start, "end": end, "inner": len(pairs) - start - end}


@dataclass
class AnalysisReport:
    """Report tables as plain JSON-compatible values.

    ``cluster_tables`` has one entry per cluster of every run, each with its
    ``share`` of cases and the top areas by contribution.
    """

    activities: list[dict]
    cluster_tables: list[dict]
    areas: list[dict]
    attributes: list[dict]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"activities": self.activities, "cluster_tables": self.cluster_tables,
                "areas": self.areas, "attributes": self.attributes, "metadata": self.metadata}

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        return cls(data["activities"], data["cluster_tables"], data["areas"],
                   data["attributes"], data.get("metadata", {}))


def build_report(log: EventLog, matrix: FeatureMatrix, suite: ClusteringSuite,
                 influence: InfluenceResult, top_per_cluster: int = 5, top_areas: int | None = 20,
                 metadata: dict | None = None) -> AnalysisReport:
    """Assemble the report tables from one pipeline run.

    Raises :class:`AnalysisError` when the inputs do not belong together.
    """
    if matrix.fingerprint != suite.matrix_fingerprint:
        raise AnalysisError("feature matrix does not match the clustering suite (fingerprint mismatch)")
    if tuple(matrix.case_ids) != log.case_ids or tuple(influence.case_ids) != log.case_ids:
        raise AnalysisError("log, feature matrix and influence result cover different cases")
    if tuple(influence.ks) != tuple(suite.ks):
        raise AnalysisError("influence result was computed for a different suite")

    clusters = []
    n = len(log)
    for r, model in enumerate(suite.models):
        for p in range(model.k):
            size = int(model.sizes[p])
            rows = [{
                "dimension": s.area.dimension,
                "value": s.area.value,
                "in_cluster": s.in_cluster,
                "cluster_density": s.cluster_density,
                "total_density": s.total_density,
                "contribution": s.contribution,
            } for s in influence.cluster_table(r, p, top_per_cluster)]
            clusters.append({"k": model.k, "cluster": p, "size": size, "share": size / n, "rows": rows})

    ranked = rank_areas(influence.area_rows(ranked_only=True))
    if top_areas is not None:
        ranked = ranked[:top_areas]
    areas = [{"dimension": r.area.dimension, "value": r.area.value,
              "contribution": r.business_area_contribution, "n_cases": r.area.member_count}
             for r in ranked]
    attributes = [{"attribute": r.attribute, "contribution": r.case_attribute_contribution,
                   "distinct_values": r.distinct_values}
                  for r in rank_attributes(influence.attribute_rows())]

    n_act = sum(1 for c in matrix.columns if c[0] == "act")
    meta = {
        "n_cases": n,
        "n_events": log.n_events,
        "original_size": log.provenance.get("original_size", n),
        "sample_seed": log.provenance.get("sample_seed"),
        "n_activities": len(log.activity_alphabet),
        "transitions": transition_summary(log),
        "n_columns": int(matrix.shape[1]),
        "n_activity_columns": n_act,
        "n_transition_columns": int(matrix.shape[1]) - n_act,
        "matrix_fingerprint": matrix.fingerprint,
        "ks": list(suite.ks),
        "master_seed": suite.master_seed,
        "runs": [{"k": m.k, "seed": m.seed, "cost": m.cost, "iterations": m.iterations,
                  "converged": m.converged, "sizes": m.sizes.tolist()} for m in suite.models],
        "n_dimensions": len(influence.dimensions),
        "n_areas": len(influence.areas),
        "top_per_cluster": top_per_cluster,
        "top_areas": top_areas,
        "score_convention": SCORE_CONVENTION,
    }
    meta.update(metadata or {})
    return AnalysisReport(activity_table(log), clusters, areas, attributes, meta)


def _md_cell(x) -> str:
    return str(x).replace("|", "\\|").replace("\n", " ")


def _md_table(header, rows) -> list[str]:
    out = ["| " + " | ".join(header) + " |",
           "|" + "|".join("---" if i == 0 else "---:" for i in range(len(header))) + "|"]
    out += ["| " + " | ".join(_md_cell(c) for c in row) + " |" for row in rows]
    return out


def _render_markdown(report: AnalysisReport) -> str:
    lines = ["# Business area influence report", ""]
    meta = report.metadata
    if meta:
        lines += [f"- cases: {meta.get('n_cases')} (of {meta.get('original_size')})",
                  f"- activities: {meta.get('n_activities')}",
                  f"- feature columns: {meta.get('n_columns')}",
                  f"- cluster counts: {meta.get('ks')}, master seed {meta.get('master_seed')}", ""]
    lines += ["## Activity profile", ""]
    lines += _md_table(["Name", "Unique Count", "Count"],
                       [(r["activity"], r["unique_count"], r["total_count"]) for r in report.activities])

    by_k: dict[int, list[dict]] = {}
    for t in report.cluster_tables:
        by_k.setdefault(t["k"], []).append(t)
    for k, tables in by_k.items():
        lines += ["", f"## Clustering results, {k} clusters", ""]
        rows = []
        for t in tables:
            head = f"Cluster{t['cluster'] + 1} ({round(100 * t['share'])}% cases)"
            if not t["rows"]:
                rows.append((head, "", "", "", ""))
            for i, r in enumerate(t["rows"]):
                rows.append((head if i == 0 else "", f"{r['dimension']} = {r['value']}",
                             f"{r['cluster_density']:.2f}", f"{r['total_density']:.2f}",
                             f"{r['contribution']:.2f}"))
        lines += _md_table(["Cluster", "Business Area", "Cluster Density", "Total Density",
                            "Contribution"], rows)

    lines += ["", "## Business areas with major effect to process flow", ""]
    lines += _md_table(["Business Area", "Contribution", "nCases"],
                       [(f"{r['dimension']} = {r['value']}", f"{r['contribution']:.3f}", r["n_cases"])
                        for r in report.areas])
    lines += ["", "## Case attributes ordered by effect on process flow", ""]
    lines += _md_table(["Case Attribute", "Contribution", "Distinct Values"],
                       [(r["attribute"], f"{r['contribution']:.3f}", r["distinct_values"])
                        for r in report.attributes])
    return "\n".join(lines) + "\n"


CSV_TABLES = (
    ("activities", ("activity", "unique_count", "total_count")),
    ("clusters", ("k", "cluster", "size", "share", "dimension", "value", "in_cluster",
                  "cluster_density", "total_density", "contribution")),
    ("areas", ("dimension", "value", "contribution", "n_cases")),
    ("attributes", ("attribute", "contribution", "distinct_values")),
)


def _csv_value(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def _render_csv(report: AnalysisReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cluster_rows = [{**{k: t[k] for k in ("k", "cluster", "size", "share")}, **r}
                    for t in report.cluster_tables for r in t["rows"]]
    data = {"activities": report.activities, "clusters": cluster_rows,
            "areas": report.areas, "attributes": report.attributes}
    for name, cols in CSV_TABLES:
        w.writerow(["table", *cols])
        for row in data[name]:
            w.writerow([name, *(_csv_value(row[c]) for c in cols)])
    return buf.getvalue()


def render(report: AnalysisReport, fmt: str) -> bytes:
    """Serialize ``report``; ``fmt`` is ``markdown``/``md``, ``csv`` or ``json``."""
    if fmt not in FORMATS:
        raise ConfigError(f"unknown report format {fmt!r}; choose from {sorted(FORMATS)}")
    ext = FORMATS[fmt]
    if ext == "md":
        text = _render_markdown(report)
    elif ext == "csv":
        text = _render_csv(report)
    else:
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False,
                          allow_nan=False) + "\n"
    return text.encode("utf-8")


def write_report(report: AnalysisReport, prefix: str | os.PathLike, formats=("md", "csv", "json")) -> list[str]:
    """Write ``<prefix>.report.<ext>`` for each format; returns the paths."""
    paths = []
    for fmt in formats:
        if fmt not in FORMATS:
            raise ConfigError(f"unknown report format {fmt!r}")
        path = f"{os.fspath(prefix)}.report.{FORMATS[fmt]}"
        with open(path, "wb") as fh:
            fh.write(render(report, fmt))
        paths.append(path)
    return paths
