"""
Reporters module for tables and figures.
"""
from .table_reporter import TableReporter
from .figure_reporter import FigureReporter

__all__ = ['TableReporter', 'FigureReporter']
