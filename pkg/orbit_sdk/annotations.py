from typing import Any, Optional

POSITIONAL_PREFIX = "arg:"
MODULUS_MARKER = "modulus"


def positional(metavar: str | None = None) -> str:
    """Mark a parameter as a CLI positional argument.

    Args:
        metavar: Name shown in the usage line. Defaults to the parameter name.

    Returns:
        A string annotation in the format "arg:metavar".
    """
    return f"{POSITIONAL_PREFIX}{metavar or ''}"


def modulus() -> str:
    """Mark an ``int`` or ``list[int]`` parameter as a modulus bounded by ``max_modulus``."""
    return MODULUS_MARKER


def extract_positional_annotation(annotations: tuple[Any, ...]) -> Optional[str]:
    """Return the metavar of a positional marker ("" when unnamed), or None."""
    for annotation in annotations:
        if isinstance(annotation, str) and annotation.startswith(POSITIONAL_PREFIX):
            return annotation[len(POSITIONAL_PREFIX):].strip()
    return None


def has_modulus_annotation(annotations: tuple[Any, ...]) -> bool:
    return MODULUS_MARKER in annotations
