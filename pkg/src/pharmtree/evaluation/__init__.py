"""Evaluation harness: similarity and property reports, random baseline,
and the optional external docking adapter."""

from .docking import DockingJob, dock, parse_affinities, write_pdbqt
from .reports import (
    PropertyTable,
    SimilarityReport,
    property_table,
    random_baseline,
    similarity_report,
)

__all__ = [
    "DockingJob",
    "PropertyTable",
    "SimilarityReport",
    "dock",
    "parse_affinities",
    "property_table",
    "random_baseline",
    "similarity_report",
    "write_pdbqt",
]
