"""
Table reporter for study and model-comparison results.
Lays out MISE / chi2 rows per method and AIC rows per model as text or CSV tables.
"""
from typing import Dict, List, Optional, Sequence

import pandas as pd
from tabulate import tabulate

from src.enums import MetricKind, StudyMethod
from src.schemas import AICComparisonDocument, FitResultDocument, MethodSummary, StudyReportDocument
from src.utils.calculations import format_metric


class TableReporter:
    """
    Generates formatted tables for study reports and model comparisons.
    """

    # Method display order
    METHOD_ORDER = [m.value for m in StudyMethod]

    TABLE_FORMAT = "github"
    RULE_WIDTH = 70

    def __init__(self, table_format: Optional[str] = None):
        """
        Initialize table reporter.

        Args:
            table_format: tabulate format name (default: github)
        """
        self.table_format = table_format or self.TABLE_FORMAT

    def _ordered(self, methods: Sequence[MethodSummary]) -> List[MethodSummary]:
        rank = {name: i for i, name in enumerate(self.METHOD_ORDER)}
        return sorted(methods, key=lambda m: rank.get(m.method, len(rank)))

    @staticmethod
    def _label(method: str) -> str:
        try:
            return StudyMethod(method).display_name
        except ValueError:
            return method

    def study_frame(self, report: StudyReportDocument) -> pd.DataFrame:
        """One row per method: mean, standard error, replicates used and paired difference."""
        rows = []
        for item in self._ordered(report.methods):
            rows.append({
                'scenario': report.scenario.name or report.scenario.family.value,
                'metric': report.metric.value,
                'method': item.method,
                'mean': item.mean,
                'standard_error': item.standard_error,
                'replicates_used': item.replicates_used,
                'excluded': item.excluded,
                'paired_difference': item.paired_difference,
                'paired_difference_se': item.paired_difference_se,
            })
        return pd.DataFrame(rows)

    def generate_study_table(self, report: StudyReportDocument) -> str:
        """
        Text table of a study report.

        Args:
            report: Study report document

        Returns:
            Formatted table string
        """
        metric_label = "MISE" if report.metric == MetricKind.MISE else "Chi-square"
        scenario = report.scenario.name or report.scenario.family.display_name
        header = [
            "=" * self.RULE_WIDTH,
            f"📊 {metric_label} over {report.replicates} simulation(s): {scenario}",
            "=" * self.RULE_WIDTH,
        ]
        rows = []
        for item in self._ordered(report.methods):
            rows.append([
                self._label(item.method),
                format_metric(item.mean) if item.mean is not None else "n/a",
                format_metric(item.standard_error) if item.standard_error is not None else "n/a",
                item.replicates_used,
                item.excluded,
                format_metric(item.paired_difference) if item.paired_difference is not None else "",
            ])
        table = tabulate(
            rows,
            headers=["Method", metric_label, "SE", "Used", "Excluded", "Diff vs unpenalised"],
            tablefmt=self.table_format,
            disable_numparse=True,
        )
        return "\n".join(header + [table])

    def aic_frame(self, doc: AICComparisonDocument) -> pd.DataFrame:
        return pd.DataFrame([
            {'model': m.label, 'aic': m.aic, 'log_likelihood': m.log_likelihood,
             'penalty': m.penalty, 'converged': m.converged}
            for m in doc.models
        ])

    def generate_aic_table(self, doc: AICComparisonDocument) -> str:
        """AIC values of the fitted models, in the order they were fitted."""
        rows = [[m.label, f"{m.aic:.2f}", f"{m.log_likelihood:.2f}", f"{m.penalty:.2f}",
                 "yes" if m.converged else "no"] for m in doc.models]
        table = tabulate(
            rows,
            headers=["Model", "AIC", "Log-likelihood", "Penalty", "Converged"],
            tablefmt=self.table_format,
            disable_numparse=True,
        )
        lines = [
            "=" * self.RULE_WIDTH,
            f"📊 AIC comparison ({doc.n_points} points)",
            "=" * self.RULE_WIDTH,
            table,
            f"Ordering (best first): {' < '.join(doc.ordering)}",
        ]
        return "\n".join(lines)

    def generate_fit_table(self, doc: FitResultDocument) -> str:
        """Coefficients with standard errors."""
        rows = [[name, f"{value:.6g}", f"{doc.standard_errors.get(name, float('nan')):.4g}"]
                for name, value in doc.theta.items()]
        table = tabulate(rows, headers=["Parameter", "Estimate", "SE"], tablefmt=self.table_format,
                         disable_numparse=True)
        status = "converged" if doc.converged else "NOT converged"
        return f"{table}\nlog-likelihood {doc.log_likelihood:.4f}, AIC {doc.aic:.4f} ({status}, {doc.iterations} iterations)"

    @staticmethod
    def local_k_frame(r_values: Sequence[float], columns: Dict[str, Sequence[float]]) -> pd.DataFrame:
        """Wide table with an `r` column followed by one column per named K curve."""
        data = {'r': list(r_values)}
        data.update({name: list(values) for name, values in columns.items()})
        return pd.DataFrame(data)
