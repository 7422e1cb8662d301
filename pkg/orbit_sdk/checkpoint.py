"""Per-m checkpointing of sweep experiments.

Finished values of m are appended to ``<output>.partial.jsonl`` as they
complete. A run with ``--resume`` reuses them, provided the file was written
for the same experiment and parameters. The file is removed once the final
output is in place.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from pydantic import BaseModel, ValidationError

from orbit_sdk.exceptions import ExperimentError
from orbit_sdk.experiment_data import ExperimentTable
from orbit_sdk.logger import logger
from orbit_sdk.parallel import ordered_map

PARTIAL_SUFFIX = ".partial.jsonl"


class CheckpointHeader(BaseModel):
    fingerprint: str


class CheckpointRecord(BaseModel):
    key: int
    table: ExperimentTable


def partial_path(output: Path) -> Path:
    return output.with_name(output.name + PARTIAL_SUFFIX)


class Checkpoint:
    def __init__(self, output: Path, fingerprint: str, resume: bool = False):
        self.path = partial_path(output)
        self.fingerprint = fingerprint
        self._done: dict[int, ExperimentTable] = {}
        if resume and self.path.exists():
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(CheckpointHeader(fingerprint=fingerprint).model_dump_json() + "\n")

    def _load(self) -> None:
        lines = self.path.read_text().splitlines()
        try:
            header = CheckpointHeader.model_validate_json(lines[0]) if lines else None
        except ValidationError as e:
            raise ExperimentError(f"Corrupt checkpoint header in {self.path}: {e}") from e
        if header is None or header.fingerprint != self.fingerprint:
            raise ExperimentError(
                f"{self.path} was written for different parameters; remove it or drop --resume"
            )
        for number, line in enumerate(lines[1:], start=2):
            try:
                record = CheckpointRecord.model_validate_json(line)
            except ValidationError:
                # An interrupted append leaves at most one torn line at the end.
                logger.warning(f"Ignoring unreadable checkpoint line {number} in {self.path}")
                continue
            self._done[record.key] = record.table
        logger.info(f"Resuming with {len(self._done)} finished value(s) from {self.path}")

    def get(self, key: int) -> Optional[ExperimentTable]:
        return self._done.get(key)

    def record(self, key: int, table: ExperimentTable) -> None:
        self._done[key] = table
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(CheckpointRecord(key=key, table=table).model_dump_json() + "\n")
            f.flush()

    def finish(self) -> None:
        self.path.unlink(missing_ok=True)

    def discard(self) -> None:
        logger.info(f"Discarding {self.path} after a failed run")
        self.path.unlink(missing_ok=True)


_active: ContextVar[Optional[Checkpoint]] = ContextVar("orbitlab_checkpoint", default=None)


@contextmanager
def active_checkpoint(checkpoint: Optional[Checkpoint]) -> Iterator[Optional[Checkpoint]]:
    token = _active.set(checkpoint)
    try:
        yield checkpoint
    finally:
        _active.reset(token)


def sweep(
    keys: Sequence[int],
    compute: Callable[[int], ExperimentTable],
    workers: Optional[int] = None,
) -> list[ExperimentTable]:
    """Evaluate ``compute`` for every key, reusing and recording checkpointed results.

    Results come back in the order of ``keys`` whatever order workers finish in.
    """
    checkpoint = _active.get()
    results: dict[int, ExperimentTable] = {}
    todo: list[int] = []
    for key in dict.fromkeys(keys):
        cached = checkpoint.get(key) if checkpoint else None
        if cached is not None:
            logger.debug(f"Reusing checkpointed result for m={key}")
            results[key] = cached
        else:
            todo.append(key)

    for key, table in zip(todo, ordered_map(compute, todo, workers)):
        if checkpoint:
            checkpoint.record(key, table)
        logger.debug(f"Finished m={key}")
        results[key] = table
    return [results[key] for key in keys]
