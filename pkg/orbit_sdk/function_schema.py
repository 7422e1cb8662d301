from dataclasses import dataclass
import inspect
from typing import Annotated, Any, Callable, get_args, get_origin, get_type_hints

from pydantic import BaseModel, ConfigDict, Field, create_model


class ExperimentParams(BaseModel):
    """Base of the parameter models built from experiment signatures."""

    model_config = ConfigDict(extra="forbid")


@dataclass
class FunctionSchema:
    """
    Captures the schema for an experiment function.
    """

    name: str
    """The name of the function."""
    params_pydantic_model: type[BaseModel]
    """A Pydantic model that represents the function's parameters."""
    params_json_schema: dict[str, Any]
    """The JSON schema for the function's parameters, derived from the Pydantic model."""
    param_annotations: dict[str, tuple[Any, ...]]
    """A map of the param name to any Annotated metadata."""
    param_types: dict[str, Any]
    """A map of the param name to its type with Annotated metadata stripped."""
    return_json_schema: dict[str, Any]
    """The JSON schema for the function's return."""
    return_type: Any
    """The return type annotation of the function."""
    signature: inspect.Signature
    """The signature of the function."""


def create_function_schema(func: Callable[..., Any]) -> FunctionSchema:
    """Create a FunctionSchema from a function."""
    func_name = func.__name__
    type_hints = get_type_hints(func, include_extras=True)
    sig = inspect.signature(func)

    param_annotations: dict[str, tuple[Any, ...]] = {}
    param_types: dict[str, Any] = {}
    for name, hint in type_hints.items():
        if name == "return":
            continue
        if get_origin(hint) is Annotated:
            param_annotations[name] = get_args(hint)[1:]
            param_types[name] = get_args(hint)[0]
        else:
            param_types[name] = hint

    fields: dict[str, Any] = {}
    for name, param in sig.parameters.items():
        ann = type_hints.get(name, param.annotation)
        if ann == inspect.Parameter.empty:
            ann = str
            param_types[name] = str
        default = param.default
        fields[name] = (
            ann,
            Field(...) if default == inspect.Parameter.empty else Field(default=default),
        )

    params_model = create_model(f"{func_name}_params", __base__=ExperimentParams, **fields)

    return_type = type_hints.get("return", Any)
    if return_type == inspect.Signature.empty:
        return_type = Any

    try:
        return_model = create_model(
            f"{func_name}_return",
            __base__=BaseModel,
            return_type=(return_type, Field(...)),
        )
        full_return_schema = return_model.model_json_schema()
        return_json_schema = full_return_schema["properties"]["return_type"]
        if "$defs" in full_return_schema:
            return_json_schema = {**return_json_schema, "$defs": full_return_schema["$defs"]}
    except Exception:
        return_json_schema = {}

    return FunctionSchema(
        name=func_name,
        params_pydantic_model=params_model,
        params_json_schema=params_model.model_json_schema(),
        param_annotations=param_annotations,
        param_types=param_types,
        return_json_schema=return_json_schema,
        return_type=return_type,
        signature=sig,
    )
