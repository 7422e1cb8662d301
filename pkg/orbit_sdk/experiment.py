import json
from functools import update_wrapper
from typing import (
    Any,
    Callable,
    Dict,
    Generic,
    Mapping,
    overload,
)
from pydantic import TypeAdapter, ValidationError
from typing_extensions import ParamSpec, TypeVar

from orbit_sdk.config import get_settings
from orbit_sdk.exceptions import ExperimentError
from orbit_sdk.experiment_data import ExperimentData, ExperimentTable, create_experiment_data
from orbit_sdk.function_schema import FunctionSchema, create_function_schema
from orbit_sdk.logger import logger

P = ParamSpec("P")
R = TypeVar("R")


class ExperimentFunction(Generic[P, R]):
    """A callable wrapper for experiment-decorated functions.

    Keeps the original call signature and adds the experiment metadata plus
    validated invocation from parameter dictionaries or JSON.
    """

    def __init__(
        self,
        func: Callable[P, R],
        schema: FunctionSchema,
        experiment_data: ExperimentData,
    ):
        self._func = func
        self._schema = schema
        self.experiment_data = experiment_data
        update_wrapper(self, func)

    @property
    def schema(self) -> FunctionSchema:
        return self._schema

    def __call__(self, *args: P.args, **kwargs: P.kwargs) -> R:
        return self._func(*args, **kwargs)

    def validate_params(self, params: Mapping[str, Any]) -> Dict[str, Any]:
        """Validate raw parameters against the signature model and the modulus bound."""
        try:
            parsed = self._schema.params_pydantic_model(**params)
        except ValidationError as e:
            raise ExperimentError(
                f"Invalid parameters for experiment {self.experiment_data.name}: {e}"
            ) from e

        bound = get_settings().max_modulus
        values = dict(parsed)
        for name in self.experiment_data.modulus_params:
            value = values[name]
            moduli = value if isinstance(value, list) else [value]
            too_large = [m for m in moduli if m is not None and m > bound]
            if too_large:
                raise ExperimentError(
                    f"{name}={too_large} exceeds max_modulus={bound} (see [tool.orbitlab])"
                )
        return values

    def dump_params(self, params: Mapping[str, Any]) -> Dict[str, Any]:
        """JSON-compatible form of validated parameters, used as output metadata."""
        return self._schema.params_pydantic_model(**params).model_dump(mode="json")

    def invoke(self, params: Mapping[str, Any]) -> R:
        kwargs = self.validate_params(params)
        # Pydantic validation ensures the kwargs match P
        result = self._func(**kwargs)  # type: ignore[arg-type]
        logger.debug(f"Experiment {self.experiment_data.name} completed.")
        return result

    def on_invoke(self, input: str) -> str:
        """Invoke the experiment with JSON input and return JSON output."""
        try:
            input_data: dict[str, Any] = json.loads(input) if input else {}
        except Exception as e:
            raise ExperimentError(
                f"Invalid JSON input for experiment {self.experiment_data.name}: {input}"
            ) from e
        if not isinstance(input_data, dict):
            raise ExperimentError(
                f"Experiment input must be a JSON object, got {type(input_data).__name__}"
            )

        result = self.invoke(input_data)

        try:
            return_type = (
                ExperimentTable
                if self._schema.return_type in (Any, None)
                else self._schema.return_type
            )
            return TypeAdapter(return_type).dump_json(result).decode()
        except (ValueError, TypeError) as e:
            raise ExperimentError(
                f"Failed to serialize result of experiment {self.experiment_data.name}: {e}"
            ) from e


EXPERIMENT_REGISTRY: Dict[str, ExperimentFunction[..., Any]] = {}


@overload
def experiment(
    func: Callable[P, R],
    *,
    name: str | None = None,
    description: str | None = None,
    stochastic: bool = False,
    sweep: bool = False,
) -> ExperimentFunction[P, R]:
    """Overload for usage as @experiment (no parentheses)."""
    ...


@overload
def experiment(
    *,
    name: str | None = None,
    description: str | None = None,
    stochastic: bool = False,
    sweep: bool = False,
) -> Callable[[Callable[P, R]], ExperimentFunction[P, R]]:
    """Overload for usage as @experiment(...)"""
    ...


def experiment(
    func: Callable[P, R] | None = None,
    *,
    name: str | None = None,
    description: str | None = None,
    stochastic: bool = False,
    sweep: bool = False,
) -> ExperimentFunction[P, R] | Callable[[Callable[P, R]], ExperimentFunction[P, R]]:
    """Register a function as a CLI experiment.

    ``stochastic`` experiments must take a ``seed`` parameter; ``sweep``
    experiments are checkpointed per value of m.
    """

    def _create_experiment_function(the_func: Callable[P, R]) -> ExperimentFunction[P, R]:
        schema = create_function_schema(func=the_func)
        if stochastic and "seed" not in schema.signature.parameters:
            raise ExperimentError(
                f"Stochastic experiment {schema.name} must take a 'seed' parameter"
            )

        data = create_experiment_data(
            func=the_func,
            function_schema=schema,
            name=name,
            description=description,
            stochastic=stochastic,
            sweep=sweep,
        )

        experiment_function = ExperimentFunction(the_func, schema, data)
        EXPERIMENT_REGISTRY[data.name] = experiment_function
        return experiment_function

    if callable(func):
        return _create_experiment_function(func)

    return _create_experiment_function


def get_registry_output() -> Dict[str, Any]:
    """Metadata of every registered experiment."""
    return {
        experiment_name: experiment_func.experiment_data.model_dump(exclude_none=True)
        for experiment_name, experiment_func in EXPERIMENT_REGISTRY.items()
    }
