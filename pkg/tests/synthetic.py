"""Builders for synthetic in-memory run artifacts used by analytics tests."""

from __future__ import annotations

import random

from sefeval.answers import AnswerLabel
from sefeval.harness.runner import ExplanationRecord, RunArtifact, RunConfig
from sefeval.lexicons import default_lexicons
from sefeval.metrics import MetricVector, score_all
from sefeval.prompts import TASK_DOMAIN, Task

FLOOR_VECTOR = MetricVector(afl=0.0, ac=0.0, ci=0.0, dtc=0.2, cea=0.0, fs=0.2)


def make_config(method: str, task: str, model: str = "synthetic-model") -> RunConfig:
    return RunConfig(
        method=method, task=task, model=model, temperature=0.0, max_tokens=1024,
        dataset_path=f"synthetic/{task}.jsonl", dataset_sha256="0" * 64,
        lexicon_version="1", cue_version="1",
    )


def make_record(example_id: str, task: Task, method: str, correct: bool,
                metrics: MetricVector = FLOOR_VECTOR, status: str = "ok",
                final_text: str = "", predicted: str | None = "yes",
                model: str = "synthetic-model") -> ExplanationRecord:
    if status != "ok":
        predicted = None
        correct = False
    gold = predicted if correct and predicted else ("no" if predicted == "yes" else "yes")
    return ExplanationRecord(
        example_id=example_id, task=task.value, domain=TASK_DOMAIN[task], method=method,
        model_id=model, stage_outputs=[final_text], final_text=final_text,
        predicted=predicted, gold=gold or "yes", metrics=metrics, correct=correct,
        status=status, timing=0.0, lexicon_version="1", cue_version="1",
    )


def artifact_with_accuracy(method: str, task: Task, accuracy_percent: float,
                           total: int = 1000, model: str = "synthetic-model") -> RunArtifact:
    """Artifact whose correct/total ratio reproduces ``accuracy_percent`` exactly
    (the given percentages are one-decimal, so total=1000 is always exact)."""
    correct_n = round(accuracy_percent * total / 100.0)
    records = [
        make_record(f"{task.value}-{i:05d}", task, method, correct=i < correct_n, model=model)
        for i in range(total)
    ]
    config = make_config(method, task.value, model)
    return RunArtifact(run_id=f"{method}-{task.value}-synthetic", config=config, records=records)


STRUCTURED_TEXT = (
    "ANSWER PREVIEW: Yes\n\n"
    "KEY FACTS:\n- the contract covers 12 units over 30 days\n- clause 4 controls \"delivery\"\n\n"
    "ANALYSIS:\n- based on the contract clause, the duty attached\n"
    "- according to the record, this suggests a breach of the unfair term\n\n"
    "CONCLUSION:\nthe evidence supports liability. My answer is: Yes"
)

UNSTRUCTURED_TEXT = (
    "well it could go either way and the situation seems generally murky and "
    "possibly the outcome depends on the reading and perhaps the parties saw "
    "it differently and somewhat hazy records make the events hard to settle "
    "and the broader picture stays muddled and the matter drags without a "
    "firm landing and observers shrug at the whole affair and " + "yes " +
    "still the account wanders on and on without committing to a stance and "
    "the tale closes where it began with the panel unsure of the outcome and "
    "the hallway talk circles back over the same ground while the afternoon "
    "fades and nothing further gets decided by anyone present in the room."
)


def correlated_pool(n: int = 10_000, structured_given_correct: float = 0.7,
                    seed: int = 20260810) -> list[ExplanationRecord]:
    """Pool where structured texts are assigned to correct answers with the
    given probability and unstructured texts to the complement."""
    rng = random.Random(seed)
    lexicons = default_lexicons()
    task = Task.HEARSAY
    terms = lexicons.for_domain(TASK_DOMAIN[task]).terms

    structured_metrics, _ = score_all(STRUCTURED_TEXT, AnswerLabel.YES, terms=terms)
    unstructured_metrics, _ = score_all(UNSTRUCTURED_TEXT, AnswerLabel.YES, terms=terms)

    records = []
    for i in range(n):
        correct = rng.random() < 0.5
        structured = rng.random() < (structured_given_correct if correct else 1 - structured_given_correct)
        text = STRUCTURED_TEXT if structured else UNSTRUCTURED_TEXT
        metrics = structured_metrics if structured else unstructured_metrics
        records.append(make_record(
            f"pool-{i:05d}", task, "direct", correct=correct,
            metrics=metrics, final_text=text,
        ))
    return records
