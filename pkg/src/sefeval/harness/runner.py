"""Plan execution, answer extraction, and run artifact persistence.

Artifacts are JSONL: a header line, one line per example record
(append-only, so interrupted runs resume by example id), and a summary
footer. Records are ordered by dataset position regardless of worker
completion order; a single writer owns the file.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..answers import AnswerLabel
from ..errors import DatasetError, EndpointError
from ..lexicons import LexiconFile, default_lexicons
from ..metrics import MetricVector, lower_preserving_length, score_all, _word_matches
from ..prompts import Method, PromptPlan, Task, TaskExample, build_prompt, render_stage
from .datasets import load_dataset
from .retrieval import retrieve_passages, split_passages

logger = logging.getLogger(__name__)

ARTIFACT_SCHEMA_VERSION = "1"
RETRIEVAL_K = 3

_DECLARATION_RE = re.compile(r"(?:my answer is|final answer|answer)\s*:\s*(yes|no)\b")


def extract_answer(final_text: str) -> AnswerLabel | None:
    """Shared answer extractor, applied to every method's final output.

    Precedence: last explicit declaration; else the last word-boundary
    yes/no in the final 200 characters; else the last one anywhere;
    else no answer.
    """
    norm = lower_preserving_length(final_text)
    declarations = list(_DECLARATION_RE.finditer(norm))
    if declarations:
        return AnswerLabel.parse(declarations[-1].group(1))
    tail = norm[max(0, len(norm) - 200):]
    for window in (tail, norm):
        tokens = _word_matches(window, "yes") + _word_matches(window, "no")
        if tokens:
            tokens.sort()
            start, end = tokens[-1]
            return AnswerLabel.parse(window[start:end])
    return None


def _stage_bindings(plan: PromptPlan, index: int, example: TaskExample,
                    outputs: list[str], executed: list[bool]) -> dict[str, str]:
    stage = plan.stages[index]
    bindings: dict[str, str] = {}
    for name in stage.needs:
        if name.startswith("stage"):
            ref = int(name[len("stage"):]) - 1
            bindings[name] = outputs[ref]
        elif name == "retrieved":
            bindings[name] = "\n".join(retrieve_passages(example.context, example.question, RETRIEVAL_K))
        elif name == "passages":
            passages = split_passages(example.context)
            bindings[name] = "\n".join(f"[{i + 1}] {p}" for i, p in enumerate(passages))
        elif name == "working_context":
            # Filtered passages when the retrieval branch ran, else the raw context.
            if len(executed) > 1 and executed[1]:
                bindings[name] = outputs[1]
            else:
                bindings[name] = example.context
    return bindings


def execute_plan(plan: PromptPlan, example: TaskExample, transport) -> list[str]:
    """Run stages in order against the transport; conditional stages are
    skipped (output "") when their predicate does not hold."""
    outputs: list[str] = []
    executed: list[bool] = []
    for index, stage in enumerate(plan.stages):
        if stage.predicate is not None:
            source_index = int(stage.predicate.source[len("stage"):]) - 1
            source_output = outputs[source_index] if executed[source_index] else ""
            if not stage.predicate.holds(source_output):
                outputs.append("")
                executed.append(False)
                continue
        prompt = render_stage(plan, index, _stage_bindings(plan, index, example, outputs, executed))
        outputs.append(transport.complete(prompt))
        executed.append(True)
    return outputs


def final_answer_text(plan: PromptPlan, outputs: list[str]) -> str:
    """Output of the last executed answer-role stage."""
    final = ""
    for stage, output in zip(plan.stages, outputs):
        if stage.role == "answer" and output:
            final = output
    return final


@dataclass(frozen=True)
class RunConfig:
    method: str
    task: str
    model: str
    temperature: float
    max_tokens: int
    dataset_path: str
    dataset_sha256: str
    lexicon_version: str
    cue_version: str
    schema_version: str = ARTIFACT_SCHEMA_VERSION


@dataclass
class ExplanationRecord:
    example_id: str
    task: str
    domain: str
    method: str
    model_id: str
    stage_outputs: list[str]
    final_text: str
    predicted: str | None
    gold: str
    metrics: MetricVector
    correct: bool
    status: str  # "ok" | "unparsed" | "failed"
    timing: float
    lexicon_version: str
    cue_version: str

    def to_json(self) -> dict:
        data = asdict(self)
        data["metrics"] = self.metrics.as_dict()
        data["type"] = "record"
        return data

    @classmethod
    def from_json(cls, data: dict) -> "ExplanationRecord":
        fields = {k: v for k, v in data.items() if k != "type"}
        fields["metrics"] = MetricVector.from_dict(fields["metrics"])
        return cls(**fields)


@dataclass
class RunSummary:
    total: int
    correct: int
    incorrect: int
    unparsed: int
    failed: int
    accuracy: float

    @classmethod
    def from_records(cls, records: list[ExplanationRecord]) -> "RunSummary":
        total = len(records)
        correct = sum(1 for r in records if r.correct)
        unparsed = sum(1 for r in records if r.status == "unparsed")
        failed = sum(1 for r in records if r.status == "failed")
        incorrect = total - correct - unparsed - failed
        accuracy = correct / total if total else 0.0
        return cls(total=total, correct=correct, incorrect=incorrect,
                   unparsed=unparsed, failed=failed, accuracy=accuracy)


@dataclass
class RunArtifact:
    run_id: str
    config: RunConfig
    records: list[ExplanationRecord] = field(default_factory=list)

    @property
    def summary(self) -> RunSummary:
        return RunSummary.from_records(self.records)


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def make_run_id(config: RunConfig) -> str:
    digest = hashlib.sha256(json.dumps(asdict(config), sort_keys=True).encode()).hexdigest()[:8]
    model_slug = re.sub(r"[^a-zA-Z0-9]+", "-", config.model).strip("-").lower() or "model"
    return f"{config.method}-{config.task}-{model_slug}-{digest}"


def score_record(example: TaskExample, method: Method, model: str,
                 stage_outputs: list[str], final_text: str, status: str,
                 timing: float, lexicons: LexiconFile, count_unique: bool = False) -> ExplanationRecord:
    predicted = extract_answer(final_text) if status != "failed" else None
    if status != "failed" and predicted is None:
        status = "unparsed"
    terms = lexicons.for_domain(example.domain).terms or None
    vector, _ = score_all(final_text, predicted, terms=terms,
                          cues=lexicons.cues, count_unique=count_unique)
    correct = status == "ok" and predicted is not None and predicted == example.gold
    return ExplanationRecord(
        example_id=example.id,
        task=example.task.value,
        domain=example.domain,
        method=method.value,
        model_id=model,
        stage_outputs=stage_outputs,
        final_text=final_text,
        predicted=predicted.value if predicted else None,
        gold=example.gold.value,
        metrics=vector,
        correct=correct,
        status=status,
        timing=timing,
        lexicon_version=lexicons.version,
        cue_version=lexicons.cues.version,
    )


def run(
    task: Task,
    method: Method,
    dataset_path: str | Path,
    transport,
    model: str,
    out_dir: str | Path,
    lexicons: LexiconFile | None = None,
    temperature: float = 0.0,
    max_tokens: int = 1024,
    parallel: int = 1,
    count_unique: bool = False,
    run_id: str | None = None,
) -> tuple[RunArtifact, Path]:
    """Execute every example, score it, and persist incrementally.

    Rerunning with the same configuration resumes after the last
    persisted example id.
    """
    lexicons = lexicons or default_lexicons()
    dataset_path = Path(dataset_path)
    examples = load_dataset(dataset_path, task)

    config = RunConfig(
        method=method.value,
        task=task.value,
        model=model,
        temperature=temperature,
        max_tokens=max_tokens,
        dataset_path=str(dataset_path),
        dataset_sha256=_sha256_file(dataset_path),
        lexicon_version=lexicons.version,
        cue_version=lexicons.cues.version,
    )
    run_id = run_id or make_run_id(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifact_path = out_dir / f"{run_id}.art"

    done: dict[str, ExplanationRecord] = {}
    if artifact_path.exists():
        existing = load_artifact(artifact_path)
        if existing.config != config:
            raise DatasetError(
                f"artifact {artifact_path} was produced by a different configuration; "
                "remove it or choose another output directory"
            )
        done = {r.example_id: r for r in existing.records}
        logger.info("resuming run %s: %d/%d records already persisted",
                    run_id, len(done), len(examples))

    def work(example: TaskExample) -> ExplanationRecord:
        started = time.perf_counter()
        plan = build_prompt(example, method)
        try:
            outputs = execute_plan(plan, example, transport)
            final_text = final_answer_text(plan, outputs)
            status = "ok"
        except EndpointError as exc:
            logger.warning("example %s failed: %s", example.id, exc)
            outputs, final_text, status = [], "", "failed"
        timing = time.perf_counter() - started
        return score_record(example, method, model, outputs, final_text,
                            status, timing, lexicons, count_unique)

    pending = [ex for ex in examples if ex.id not in done]
    records_by_id = dict(done)

    mode = "w" if not done else "r+"
    with artifact_path.open(mode, encoding="utf-8") as handle:
        if not done:
            header = {"type": "header", "run_id": run_id, **asdict(config)}
            handle.write(json.dumps(header, ensure_ascii=False) + "\n")
        else:
            # Drop any previous footer, keep header + records, then append.
            lines = [l for l in handle.read().splitlines()
                     if l.strip() and json.loads(l).get("type") != "summary"]
            handle.seek(0)
            handle.truncate()
            handle.write("\n".join(lines) + "\n")

        if pending:
            workers = max(1, parallel)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(work, ex) for ex in pending]
                for future, example in zip(futures, pending):
                    record = future.result()
                    records_by_id[example.id] = record
                    handle.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
                    handle.flush()

        ordered = [records_by_id[ex.id] for ex in examples]
        summary = RunSummary.from_records(ordered)
        handle.write(json.dumps({"type": "summary", **asdict(summary)}, ensure_ascii=False) + "\n")

    artifact = RunArtifact(run_id=run_id, config=config, records=ordered)
    logger.info("run %s complete: %s", run_id, artifact.summary)
    return artifact, artifact_path


def load_artifact(path: str | Path) -> RunArtifact:
    path = Path(path)
    if not path.exists():
        raise DatasetError("artifact file not found", path=str(path))
    run_id = None
    config = None
    records = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno)
            kind = data.get("type")
            if kind == "header":
                run_id = data["run_id"]
                config_fields = {k: v for k, v in data.items() if k not in ("type", "run_id")}
                config = RunConfig(**config_fields)
            elif kind == "record":
                records.append(ExplanationRecord.from_json(data))
            elif kind == "summary":
                continue
            else:
                raise DatasetError(f"unknown line type {kind!r}", path=str(path), line=lineno)
    if run_id is None or config is None:
        raise DatasetError("artifact has no header", path=str(path))
    return RunArtifact(run_id=run_id, config=config, records=records)
