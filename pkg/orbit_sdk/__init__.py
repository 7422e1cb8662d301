from .experiment import (
    experiment,
    ExperimentFunction,
    EXPERIMENT_REGISTRY,
    get_registry_output,
)

from .annotations import (
    modulus,
    positional,
)

from .experiment_data import ExperimentData, ExperimentTable

__all__ = [
    "experiment",
    "ExperimentFunction",
    "EXPERIMENT_REGISTRY",
    "get_registry_output",
    "ExperimentData",
    "ExperimentTable",
    "modulus",
    "positional",
]
