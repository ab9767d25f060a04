"""Artifact readers and writers."""
from .artifact_exporter import (
    ArtifactExporter,
    document_json,
    read_document,
    read_marked_pattern,
    read_pattern,
    read_scenario,
    read_surface,
    read_window,
    window_path_for,
)

__all__ = [
    'ArtifactExporter',
    'document_json',
    'read_document',
    'read_marked_pattern',
    'read_pattern',
    'read_scenario',
    'read_surface',
    'read_window',
    'window_path_for',
]
