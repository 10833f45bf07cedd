"""Prompt plans: the structured template, its eight ablation variants, and
the six baseline strategies.

A PromptPlan is an ordered list of stage templates built for one task
example. Context and question are substituted at build time, so plans
render byte-identically for a fixed example. Remaining placeholders
(``{stage1}``, ``{retrieved}``, ...) are declared per stage in ``needs``
and bound by the executor; conditional stages carry a token predicate
evaluated against an earlier stage's output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .answers import AnswerLabel
from .errors import MissingBindingError, PromptError


class Task(str, Enum):
    FPB = "fpb"
    CONSUMER_QA = "consumerqa"
    HEARSAY = "hearsay"
    PUBMED_QA = "pubmedqa"

    @classmethod
    def parse(cls, value: str) -> "Task":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise PromptError(f"unknown task: {value!r}")


TASK_DOMAIN = {
    Task.FPB: "financial",
    Task.CONSUMER_QA: "legal",
    Task.HEARSAY: "legal",
    Task.PUBMED_QA: "medical",
}

EXPECTED_TASK_SIZES = {
    Task.FPB: 128,
    Task.CONSUMER_QA: 396,
    Task.HEARSAY: 94,
    Task.PUBMED_QA: 1000,
}


class Method(str, Enum):
    DIRECT = "direct"
    COT = "cot"
    TOT = "tot"
    COVE = "cove"
    VRAG = "vrag"
    SELFRAG = "selfrag"
    SEF = "sef"
    SEF_WO_AFL = "sef_wo_afl"
    SEF_WO_AC = "sef_wo_ac"
    SEF_WO_CI = "sef_wo_ci"
    SEF_WO_DTC = "sef_wo_dtc"
    SEF_WO_CEA = "sef_wo_cea"
    SEF_WO_FS = "sef_wo_fs"
    SEF_WO_PRESENTATION = "sef_wo_presentation"
    SEF_WO_DOMAIN = "sef_wo_domain"

    @classmethod
    def parse(cls, value: str) -> "Method":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise PromptError(f"unknown method: {value!r}")

    @property
    def is_sef(self) -> bool:
        return self.value.startswith("sef")


BASELINES = (Method.DIRECT, Method.COT, Method.TOT, Method.COVE, Method.VRAG, Method.SELFRAG)

SEF_VARIANTS = tuple(m for m in Method if m.is_sef)

# Components whose template text each ablation removes.
ABLATED_COMPONENTS = {
    Method.SEF: frozenset(),
    Method.SEF_WO_AFL: frozenset({"afl"}),
    Method.SEF_WO_AC: frozenset({"ac"}),
    Method.SEF_WO_CI: frozenset({"ci"}),
    Method.SEF_WO_DTC: frozenset({"dtc"}),
    Method.SEF_WO_CEA: frozenset({"cea"}),
    Method.SEF_WO_FS: frozenset({"fs"}),
    Method.SEF_WO_PRESENTATION: frozenset({"afl", "ac", "ci"}),
    Method.SEF_WO_DOMAIN: frozenset({"dtc", "cea", "fs"}),
}


@dataclass(frozen=True)
class TaskExample:
    id: str
    task: Task
    context: str
    question: str
    gold: AnswerLabel | None = None

    def __post_init__(self):
        if not self.context:
            raise ValueError("example context must be nonempty")
        if not self.question:
            raise ValueError("example question must be nonempty")

    @property
    def domain(self) -> str:
        return TASK_DOMAIN[self.task]


@dataclass(frozen=True)
class StagePredicate:
    """Run the stage iff ``run_token`` occurs before ``skip_token`` in the
    named prior stage's output (case-insensitive). Neither token: skip."""

    source: str
    run_token: str
    skip_token: str

    def holds(self, output: str) -> bool:
        hay = output.upper()
        run_at = hay.find(self.run_token.upper())
        skip_at = hay.find(self.skip_token.upper())
        if run_at < 0:
            return False
        return skip_at < 0 or run_at < skip_at


@dataclass(frozen=True)
class StageTemplate:
    text: str
    role: str
    needs: tuple[str, ...] = ()
    predicate: StagePredicate | None = None


@dataclass(frozen=True)
class PromptPlan:
    method: Method
    example_id: str
    stages: tuple[StageTemplate, ...]


# ---------------------------------------------------------------------------
# The structured (SEF) template.
#
# Sections mirror the four-step scheme: commit, ground, defend, conclude.
# Every line carries the set of metric components whose instructions it
# realizes; an ablation drops a line iff all of the line's components are
# ablated. Sections are joined by exactly one blank line.
# ---------------------------------------------------------------------------

DOMAIN_ROLES = {
    "legal": "You are a legal analyst.",
    "medical": "You are a medical analyst.",
    "financial": "You are a financial analyst.",
}

_NONE = frozenset()


def _sef_sections(domain: str, context: str, question: str):
    return [
        [(_NONE, f"{DOMAIN_ROLES[domain]} Analyze the following question with precision and clarity.")],
        [(frozenset({"dtc"}), f"Use precise {domain} terminology consistently.")],
        [(frozenset({"fs"}), "Cite specific facts from the context, not vague generalizations.")],
        [(_NONE, f"Context: {context}"), (_NONE, f"Question: {question}")],
        [(frozenset({"afl"}), "ANSWER PREVIEW: State your answer upfront (Yes or No).")],
        [(frozenset({"fs"}), "KEY FACTS: List 2-3 specific facts from the context that are most relevant.")],
        [
            (frozenset({"dtc", "cea"}), "ANALYSIS:"),
            (frozenset({"dtc"}), "- Use precise domain terminology"),
            (frozenset({"cea"}), "- Explain how each fact supports your answer"),
        ],
        [
            (frozenset({"ci"}), "CONCLUSION:"),
            (frozenset({"ci"}), "- State your final answer clearly and unambiguously"),
            (frozenset({"ci"}), "- Summarize the key evidence supporting your answer"),
            (frozenset({"ac"}), "- End with: My answer is: [Yes/No]"),
        ],
    ]


def build_sef_prompt(example: TaskExample, variant: Method = Method.SEF) -> PromptPlan:
    """Single-stage plan for the structured template or one of its ablations."""
    if variant not in ABLATED_COMPONENTS:
        raise PromptError(f"not a structured-template variant: {variant.value}")
    removed = ABLATED_COMPONENTS[variant]
    blocks = []
    for section in _sef_sections(example.domain, example.context, example.question):
        lines = [line for tags, line in section if not (tags and tags <= removed)]
        if lines:
            blocks.append("\n".join(lines))
    text = "\n\n".join(blocks)
    return PromptPlan(method=variant, example_id=example.id,
                      stages=(StageTemplate(text=text, role="answer"),))


# ---------------------------------------------------------------------------
# Baselines.
# ---------------------------------------------------------------------------


def _direct(ex: TaskExample):
    text = (
        "Answer the following question.\n"
        f"Context: {ex.context}\n"
        f"Question: {ex.question}\n"
        "Provide only the answer (Yes/No).\n"
        "Answer:"
    )
    return (StageTemplate(text=text, role="answer"),)


def _cot(ex: TaskExample):
    text = (
        "Given the following context and question, let's think step by step.\n"
        f"Context: {ex.context}\n"
        f"Question: {ex.question}\n"
        "Let's think step by step:\n"
        "1. First, let me understand the context and relevant rules.\n"
        "2. Then, I'll analyze how they apply to this question.\n"
        "3. Finally, I'll determine the correct answer.\n"
        "Step-by-step reasoning:"
    )
    return (StageTemplate(text=text, role="answer"),)


def _tot(ex: TaskExample):
    stage1 = (
        "Consider the following context and question.\n"
        f"Context: {ex.context}\n"
        f"Question: {ex.question}\n"
        "Propose 3 different analytical approaches (1-2 sentences each)."
    )
    stage2 = (
        f"Context: {ex.context}\n"
        f"Question: {ex.question}\n"
        "Proposed approaches:\n"
        "{stage1}\n"
        "For each approach: Develop this into a complete analysis of the question, "
        "then state your final answer (Yes or No)."
    )
    stage3 = (
        f"Context: {ex.context}\n"
        f"Question: {ex.question}\n"
        "Candidate analyses:\n"
        "{stage2}\n"
        "Which path (1, 2, or 3) provides the most thorough and accurate analysis?\n"
        "State the selected path and its final answer (Yes or No)."
    )
    return (
        StageTemplate(text=stage1, role="approaches"),
        StageTemplate(text=stage2, role="analyses", needs=("stage1",)),
        StageTemplate(text=stage3, role="answer", needs=("stage2",)),
    )


def _cove(ex: TaskExample):
    stage1 = (
        "Answer the question with reasoning.\n"
        f"Context: {ex.context}\n"
        f"Question: {ex.question}"
    )
    stage2 = (
        "Initial analysis:\n"
        "{stage1}\n"
        "Generate 3 verification questions to check accuracy."
    )
    stage3 = (
        f"Context: {ex.context}\n"
        "Verification questions:\n"
        "{stage2}\n"
        "Answer each verification question against the context."
    )
    stage4 = (
        f"Question: {ex.question}\n"
        "Initial analysis:\n"
        "{stage1}\n"
        "Verification answers:\n"
        "{stage3}\n"
        "Based on initial analysis and verification, provide your final answer "
        "(incorporate any corrections)."
    )
    return (
        StageTemplate(text=stage1, role="initial_answer"),
        StageTemplate(text=stage2, role="verification_questions", needs=("stage1",)),
        StageTemplate(text=stage3, role="verification_answers", needs=("stage2",)),
        StageTemplate(text=stage4, role="answer", needs=("stage1", "stage3")),
    )


def _vrag(ex: TaskExample):
    text = (
        "Answer the question using the provided context.\n"
        "Retrieved Context: {retrieved}\n"
        f"Question: {ex.question}\n"
        "Based on the retrieved context, provide your reasoning and answer."
    )
    return (StageTemplate(text=text, role="answer", needs=("retrieved",)),)


def _selfrag(ex: TaskExample):
    stage1 = (
        f"Context: {ex.context}\n"
        f"Question: {ex.question}\n"
        "Assess if retrieval is needed (RETRIEVE or USE_FULL)."
    )
    stage2 = (
        f"Question: {ex.question}\n"
        "Passages:\n"
        "{passages}\n"
        "Filter passages by relevance (RELEVANT or NOT_RELEVANT)."
    )
    stage3 = (
        "Context:\n"
        "{working_context}\n"
        f"Question: {ex.question}\n"
        "Generate with reflection: [Reflection: ...] [Generation: ...] [Answer: ...]"
    )
    stage4 = (
        f"Question: {ex.question}\n"
        "Draft response:\n"
        "{stage3}\n"
        "Self-critique for accuracy (NEEDS_REFINEMENT or SUFFICIENT)."
    )
    stage5 = (
        f"Question: {ex.question}\n"
        "Draft response:\n"
        "{stage3}\n"
        "Critique:\n"
        "{stage4}\n"
        "Refine based on critique. State your final answer (Yes or No)."
    )
    return (
        StageTemplate(text=stage1, role="retrieval_decision"),
        StageTemplate(
            text=stage2, role="filtered_passages", needs=("passages",),
            predicate=StagePredicate(source="stage1", run_token="RETRIEVE", skip_token="USE_FULL"),
        ),
        StageTemplate(text=stage3, role="answer", needs=("working_context",)),
        StageTemplate(text=stage4, role="critique", needs=("stage3",)),
        StageTemplate(
            text=stage5, role="answer", needs=("stage3", "stage4"),
            predicate=StagePredicate(source="stage4", run_token="NEEDS_REFINEMENT", skip_token="SUFFICIENT"),
        ),
    )


_BASELINE_BUILDERS = {
    Method.DIRECT: _direct,
    Method.COT: _cot,
    Method.TOT: _tot,
    Method.COVE: _cove,
    Method.VRAG: _vrag,
    Method.SELFRAG: _selfrag,
}


def build_baseline_prompt(example: TaskExample, method: Method) -> PromptPlan:
    try:
        builder = _BASELINE_BUILDERS[method]
    except KeyError:
        raise PromptError(f"not a baseline method: {method.value}")
    return PromptPlan(method=method, example_id=example.id, stages=builder(example))


def build_prompt(example: TaskExample, method: Method) -> PromptPlan:
    if method.is_sef:
        return build_sef_prompt(example, method)
    return build_baseline_prompt(example, method)


_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")


def render_stage(plan: PromptPlan, stage_index: int, bindings: dict[str, str]) -> str:
    """Substitute a stage's declared placeholders; all of them must be bound.

    Only placeholders listed in the stage's ``needs`` are substituted, so
    brace sequences inside example text or bound values pass through
    untouched.
    """
    stage = plan.stages[stage_index]
    missing = [name for name in stage.needs if name not in bindings]
    if missing:
        raise MissingBindingError(
            f"stage {stage_index + 1} of {plan.method.value} plan is missing "
            f"bindings: {', '.join(missing)}"
        )
    needed = set(stage.needs)

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name in needed:
            return bindings[name]
        return match.group(0)

    return _PLACEHOLDER_RE.sub(substitute, stage.text)


def render_stage_preview(plan: PromptPlan, stage_index: int) -> str:
    """Render with unbound placeholders marked (for inspection output)."""
    stage = plan.stages[stage_index]
    previews = {name: f"[{name} output]" for name in stage.needs}
    return render_stage(plan, stage_index, previews)
