"""Minimum-genus embeddings of complete graphs via index-1 current graphs."""

from .surface import (
    EmbeddedGraph,
    Face,
    GenusReport,
    FlipError,
    InconsistencyError,
    NonterminationError,
    StructuralError,
    SurgeryError,
    complete_graph_genus,
    parse_rotation_text,
)
from .currents import (
    CurrentGraph,
    Log,
    PrincipleReport,
    VortexClassification,
    from_log,
    parse_current_graph,
    emit_current_graph,
)

__all__ = [
    "EmbeddedGraph",
    "Face",
    "GenusReport",
    "FlipError",
    "InconsistencyError",
    "NonterminationError",
    "StructuralError",
    "SurgeryError",
    "complete_graph_genus",
    "parse_rotation_text",
    "CurrentGraph",
    "Log",
    "PrincipleReport",
    "VortexClassification",
    "from_log",
    "parse_current_graph",
    "emit_current_graph",
]

__version__ = "0.1.0"
