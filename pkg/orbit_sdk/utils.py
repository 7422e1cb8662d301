"""Filesystem helpers for experiment metadata and output files."""

import os
import tempfile
from pathlib import Path
from typing import Optional


def find_project_root(start: Path) -> Optional[Path]:
    """Walk up from ``start`` to the first directory holding .git or pyproject.toml."""
    for parent in [start] + list(start.parents):
        if (parent / ".git").exists() or (parent / "pyproject.toml").exists():
            return parent
    return None


def get_relative_path(file_path: str) -> Optional[str]:
    """Path of an experiment source file relative to the project root.

    The root is searched upwards from the file first and from the current
    working directory second; without a root the path is returned unchanged.
    """
    if not file_path:
        return None

    try:
        abs_path = Path(file_path).resolve()
    except (OSError, RuntimeError):
        abs_path = Path(file_path)
        if not abs_path.is_absolute():
            abs_path = Path.cwd() / abs_path

    for start in (abs_path.parent, Path.cwd()):
        root = find_project_root(start)
        if root is None:
            continue
        try:
            return str(abs_path.relative_to(root))
        except ValueError:
            pass

    return file_path


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a temporary file in the same directory and rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
