"""sefeval: structural scoring and evaluation of model explanations."""

from .answers import AnswerLabel
from .lexicons import CueSet, LexiconFile, LexiconSet, default_cues, default_lexicons, load_lexicons
from .metrics import (
    CueMatch,
    ExplanationText,
    MetricVector,
    normalize,
    score_ac,
    score_afl,
    score_all,
    score_cea,
    score_ci,
    score_dtc,
    score_fs,
)
from .prompts import (
    Method,
    PromptPlan,
    StageTemplate,
    Task,
    TaskExample,
    build_baseline_prompt,
    build_prompt,
    build_sef_prompt,
    render_stage,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerLabel",
    "CueMatch",
    "CueSet",
    "ExplanationText",
    "LexiconFile",
    "LexiconSet",
    "Method",
    "MetricVector",
    "PromptPlan",
    "StageTemplate",
    "Task",
    "TaskExample",
    "build_baseline_prompt",
    "build_prompt",
    "build_sef_prompt",
    "default_cues",
    "default_lexicons",
    "load_lexicons",
    "normalize",
    "render_stage",
    "score_ac",
    "score_afl",
    "score_all",
    "score_cea",
    "score_ci",
    "score_dtc",
    "score_fs",
    "__version__",
]
