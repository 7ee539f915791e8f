"""Pairwise preference study analysis."""

from txt2vid.study.curve import (
    CurvePoint,
    UnjoinedPair,
    crossing_ratio,
    crossings_by_content,
    preference_curve,
    wilson_interval,
    write_curve_csv,
    write_curve_json,
    write_plot_data,
)
from txt2vid.study.synthetic import SHAPES, synthetic_ratio_map, synthetic_votes
from txt2vid.study.votes import (
    DuplicateVote,
    PreferenceRecord,
    RowErrors,
    SanityReport,
    SchemaMismatch,
    filter_sanity,
    load_votes,
    write_votes,
)

__all__ = [
    "CurvePoint",
    "UnjoinedPair",
    "crossing_ratio",
    "crossings_by_content",
    "preference_curve",
    "wilson_interval",
    "write_curve_csv",
    "write_curve_json",
    "write_plot_data",
    "SHAPES",
    "synthetic_ratio_map",
    "synthetic_votes",
    "DuplicateVote",
    "PreferenceRecord",
    "RowErrors",
    "SanityReport",
    "SchemaMismatch",
    "filter_sanity",
    "load_votes",
    "write_votes",
]
