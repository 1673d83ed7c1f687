"""End-to-end analysis: sample, encode, cluster, score, report."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .clustering import DEFAULT_KS, ClusteringSuite, run_suite
from .errors import AnalysisError
from .eventlog import EventLog, sample_cases
from .features import PROFILES, FeatureMatrix, encode
from .influence import DimensionConfig, DimensionTable, InfluenceResult, analyze, derive_dimensions
from .report import AnalysisReport, build_report

__all__ = ["DEFAULT_SAMPLE_SIZE", "PipelineResult", "run_pipeline"]

DEFAULT_SAMPLE_SIZE = 10_000


@dataclass(frozen=True, eq=False)
class PipelineResult:
    log: EventLog
    matrix: FeatureMatrix
    suite: ClusteringSuite
    dimensions: DimensionTable
    influence: InfluenceResult
    report: AnalysisReport


def run_pipeline(log: EventLog, *, sample_size: int | None = DEFAULT_SAMPLE_SIZE, seed: int = 42,
                 ks=DEFAULT_KS, profiles=PROFILES, dimensions: DimensionConfig | None = None,
                 top_per_cluster: int = 5, top_areas: int | None = 20, max_iter: int = 100,
                 workers: int | None = 1, timings: bool = False) -> PipelineResult:
    """Run the whole analysis on ``log``.

    ``seed`` drives both case sampling and the per-run clustering seeds.
    Timings are left out of the report unless asked for, because they make
    otherwise identical runs produce different output.
    """
    clock = {}
    t0 = time.perf_counter()
    if sample_size is not None:
        log = sample_cases(log, sample_size, seed)
    if len(log) == 0:
        raise AnalysisError("event log has no cases")
    clock["sample"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    matrix = encode(log, profiles)
    clock["encode"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    suite = run_suite(matrix, ks, seed, max_iter, workers)
    clock["cluster"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    config = dimensions or DimensionConfig()
    table = derive_dimensions(log, config)
    influence = analyze(table, suite, include_empty=config.include_empty)
    clock["influence"] = time.perf_counter() - t0

    extra = {"profiles": list(dict.fromkeys(profiles)), "sample_size": sample_size}
    if timings:
        extra["timings_s"] = clock
    report = build_report(log, matrix, suite, influence, top_per_cluster, top_areas, extra)
    return PipelineResult(log, matrix, suite, table, influence, report)
