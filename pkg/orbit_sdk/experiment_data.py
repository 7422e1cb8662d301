from __future__ import annotations

import inspect
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field, model_validator

from orbit_sdk.annotations import extract_positional_annotation, has_modulus_annotation
from orbit_sdk.function_schema import FunctionSchema
from orbit_sdk.utils import get_relative_path

Cell = Union[bool, int, float, str]


class ExperimentTable(BaseModel):
    """Tabular experiment output: one CSV row per entry of ``rows``."""

    columns: List[str]
    rows: List[List[Cell]] = Field(default_factory=list)
    summary: Dict[str, Cell] = Field(default_factory=dict)
    """Scalar results, emitted as ``result.<key>`` metadata."""

    @model_validator(mode="after")
    def _check_widths(self) -> "ExperimentTable":
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"Row {row} has {len(row)} cells for {len(self.columns)} columns"
                )
        return self

    @classmethod
    def from_models(
        cls,
        model: type[BaseModel],
        rows: Sequence[BaseModel],
        summary: Optional[Dict[str, Cell]] = None,
    ) -> "ExperimentTable":
        return cls(
            columns=list(model.model_fields),
            rows=[list(row.model_dump().values()) for row in rows],
            summary=summary or {},
        )

    @classmethod
    def concat(cls, parts: Sequence["ExperimentTable"]) -> "ExperimentTable":
        if not parts:
            raise ValueError("Nothing to concatenate")
        columns = parts[0].columns
        rows: List[List[Cell]] = []
        summary: Dict[str, Cell] = {}
        for part in parts:
            if part.columns != columns:
                raise ValueError(f"Column mismatch: {part.columns} vs {columns}")
            rows.extend(part.rows)
            summary.update(part.summary)
        return cls(columns=columns, rows=rows, summary=summary)


class ExperimentData(BaseModel):
    name: str
    """The subcommand name of the experiment."""
    description: Optional[str]
    """One-line description shown in the CLI help."""
    stochastic: bool = False
    """Whether the experiment draws random samples; such experiments take a ``seed``."""
    sweep: bool = False
    """Whether the experiment sweeps over m and checkpoints finished values."""
    file_path: Optional[str] = None
    """The file path of the experiment function."""
    file_line_number: Optional[int] = None
    """The line number of the experiment function."""
    params_json_schema: Dict[str, Any]
    """The json schema of the params."""
    return_json_schema: Dict[str, Any]
    """The return schema of the function."""
    positional_params: Dict[str, str] = Field(default_factory=dict)
    """Param name to metavar for parameters passed positionally on the command line."""
    modulus_params: List[str] = Field(default_factory=list)
    """Params whose values are bounded by ``max_modulus``."""


def create_experiment_data(
    func: Callable[..., Any],
    function_schema: FunctionSchema,
    name: str | None = None,
    description: str | None = None,
    stochastic: bool = False,
    sweep: bool = False,
) -> ExperimentData:
    """Create an ExperimentData object from an experiment function."""
    file_path = get_relative_path(inspect.getfile(func))

    try:
        line_number = inspect.getsourcelines(func)[1]
    except (OSError, TypeError):
        line_number = None

    positional_params: dict[str, str] = {}
    modulus_params: list[str] = []
    for param, annotations in function_schema.param_annotations.items():
        metavar = extract_positional_annotation(annotations)
        if metavar is not None:
            positional_params[param] = metavar or param
        if has_modulus_annotation(annotations):
            modulus_params.append(param)

    return ExperimentData(
        name=name or function_schema.name.replace("_", "-"),
        description=description or inspect.getdoc(func),
        stochastic=stochastic,
        sweep=sweep,
        params_json_schema=function_schema.params_json_schema,
        return_json_schema=function_schema.return_json_schema,
        file_path=file_path,
        file_line_number=line_number,
        positional_params=positional_params,
        modulus_params=modulus_params,
    )
