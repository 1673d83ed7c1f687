"""Discover business areas that shape process flow.

Cases are clustered by their flow profile (activities and directly-follows
transitions) with k-modes at several cluster counts; every case attribute
value is then scored by how much denser it is inside clusters than overall.
"""
from .clustering import DEFAULT_KS, ClusterModel, ClusteringSuite, hamming, kmodes, run_suite
from .errors import AnalysisError, ConfigError, FlowAreasError, ParseError
from .eventlog import AttributeValue, Case, CsvMapping, Event, EventLog, parse_csv, parse_xes, sample_cases, write_csv
from .features import FeatureMatrix, activity_profile, encode, transition_profile
from .influence import (
    BusinessArea,
    DimensionConfig,
    LiftRule,
    analyze,
    business_area_contribution,
    case_attribute_contribution,
    contribution,
    density,
    derive_dimensions,
    rank_areas,
    rank_attributes,
)
from .pipeline import run_pipeline
from .report import AnalysisReport, build_report, render, write_report
from .synthgen import Dimension, Edit, Effect, SynthSpec, generate

__version__ = "0.1.0"
