"""Dataset ingestion: one JSON object per line with fields
{id, context, question, gold}."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..answers import AnswerLabel
from ..errors import DatasetError
from ..prompts import EXPECTED_TASK_SIZES, Task, TaskExample

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "context", "question", "gold")


def load_dataset(path: str | Path, task: Task) -> list[TaskExample]:
    """Load and validate a dataset file; schema violations are fatal with a
    line number, a count that differs from the task's published size only
    warns."""
    path = Path(path)
    if not path.exists():
        raise DatasetError("dataset file not found", path=str(path))

    examples: list[TaskExample] = []
    seen_ids: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno)
            if not isinstance(record, dict):
                raise DatasetError("record is not an object", path=str(path), line=lineno)
            for field in REQUIRED_FIELDS:
                if field not in record:
                    raise DatasetError(f"missing field {field!r}", path=str(path), line=lineno)
            try:
                gold = AnswerLabel.parse(str(record["gold"]))
            except ValueError as exc:
                raise DatasetError(str(exc), path=str(path), line=lineno)
            example_id = str(record["id"])
            if example_id in seen_ids:
                raise DatasetError(f"duplicate id {example_id!r}", path=str(path), line=lineno)
            seen_ids.add(example_id)
            try:
                example = TaskExample(
                    id=example_id,
                    task=task,
                    context=str(record["context"]),
                    question=str(record["question"]),
                    gold=gold,
                )
            except ValueError as exc:
                raise DatasetError(str(exc), path=str(path), line=lineno)
            examples.append(example)

    expected = EXPECTED_TASK_SIZES[task]
    if len(examples) != expected:
        logger.warning(
            "dataset size mismatch for %s: got %d examples, published size is %d",
            task.value, len(examples), expected,
        )
    logger.info("loaded %d examples for task %s from %s", len(examples), task.value, path)
    return examples
