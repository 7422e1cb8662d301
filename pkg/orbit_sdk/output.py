"""CSV and JSON renderings of an experiment table.

CSV: header row, data rows, then ``# key=value`` metadata lines sorted by key.
JSON: the same content as one object. Neither carries timestamps, so equal
inputs give byte-identical files.
"""

import csv
import io
import json
from enum import Enum
from typing import Any, Dict, List, Mapping

from pydantic import BaseModel

from orbit_sdk.experiment_data import Cell, ExperimentTable
from orbitlab import __version__


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class ExperimentReport(BaseModel):
    experiment: str
    columns: List[str]
    rows: List[List[Cell]]
    summary: Dict[str, Cell]
    metadata: Dict[str, str]
    """Experiment name, parameters as ``param.<name>`` and library version."""


def _format_param(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True)


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_report(
    experiment: str, params: Mapping[str, Any], table: ExperimentTable
) -> ExperimentReport:
    metadata = {"experiment": experiment, "version": __version__}
    for name, value in params.items():
        metadata[f"param.{name}"] = _format_param(value)
    return ExperimentReport(
        experiment=experiment,
        columns=table.columns,
        rows=table.rows,
        summary=table.summary,
        metadata=metadata,
    )


def render_csv(report: ExperimentReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([format_cell(v) for v in row])
    trailer = dict(report.metadata)
    for key, value in report.summary.items():
        trailer[f"result.{key}"] = format_cell(value)
    for key in sorted(trailer):
        buffer.write(f"# {key}={trailer[key]}\n")
    return buffer.getvalue()


def render_json(report: ExperimentReport) -> str:
    return report.model_dump_json(indent=2) + "\n"


def render(report: ExperimentReport, fmt: OutputFormat) -> str:
    return render_json(report) if fmt == OutputFormat.JSON else render_csv(report)
