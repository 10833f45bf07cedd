"""Deterministic structural scoring of explanation texts.

Six metrics, each a pure function of (text, predicted answer, cue data)
returning a value from a closed discrete set:

    afl  {0, 0.5, 1}         answer present in the head/tail windows
    ac   {0, 0.3, 0.7, 1}    explicitness of the answer declaration
    ci   {0, 0.6, 1}         conclusion sectioning
    dtc  {0.2, 0.5, 0.8, 1}  domain-term usage (0.5 when no lexicon)
    cea  {0, 0.3, 0.5, 0.8, 1}  evidence-linking and analysis cues
    fs   {0.2, 0.4, 0.6, 0.8, 1}  specificity vs vagueness indicators

Matching conventions (shared by every metric):
  - all matching runs on a lowercased copy of the text; lowercasing is
    per-character and length-preserving (characters whose lowercase form
    would expand are kept as-is, so spans in the normalized text are
    valid spans in the raw text);
  - phrase cues match as substrings, counted non-overlapping
    leftmost-first per cue (different cues may overlap each other);
  - the answer tokens "yes"/"no" match only at word boundaries, where a
    word character is alphanumeric or "_";
  - number indicators are maximal ASCII digit runs with an optional
    single decimal part and optional trailing "%";
  - quote indicators are balanced straight double quotes enclosing at
    least one non-quote character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .answers import AnswerLabel
from .lexicons import CueSet, LexiconSet, default_cues

HEAD_TAIL_WINDOW = 200

METRIC_NAMES = ("afl", "ac", "ci", "dtc", "cea", "fs")

ALLOWED_VALUES = {
    "afl": (0.0, 0.5, 1.0),
    "ac": (0.0, 0.3, 0.7, 1.0),
    "ci": (0.0, 0.6, 1.0),
    "dtc": (0.2, 0.5, 0.8, 1.0),
    "cea": (0.0, 0.3, 0.5, 0.8, 1.0),
    "fs": (0.2, 0.4, 0.6, 0.8, 1.0),
}

_NUMBER_RE = re.compile(r"[0-9]+(?:\.[0-9]+)?%?")
_QUOTE_RE = re.compile(r'"[^"]+"')


def lower_preserving_length(text: str) -> str:
    """Per-character lowercase; characters that would expand stay as-is."""
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


@dataclass(frozen=True)
class ExplanationText:
    raw: str
    normalized: str


def normalize(text: str) -> ExplanationText:
    """Total and idempotent; ``len(normalized) == len(raw)`` always holds."""
    return ExplanationText(raw=text, normalized=lower_preserving_length(text))


def _coerce(text: "str | ExplanationText") -> ExplanationText:
    if isinstance(text, ExplanationText):
        return text
    return normalize(text)


@dataclass(frozen=True)
class MetricVector:
    afl: float
    ac: float
    ci: float
    dtc: float
    cea: float
    fs: float

    def __post_init__(self):
        for name in METRIC_NAMES:
            value = getattr(self, name)
            if value not in ALLOWED_VALUES[name]:
                raise ValueError(f"{name}={value!r} outside its discrete value set")

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "MetricVector":
        return cls(**{name: float(data[name]) for name in METRIC_NAMES})


@dataclass(frozen=True)
class CueMatch:
    """One fired cue: the cue identifier and its character span in the raw text."""

    metric: str
    cue: str
    start: int
    end: int


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _word_matches(text: str, word: str) -> list[tuple[int, int]]:
    """Word-boundary occurrences of ``word``, leftmost non-overlapping."""
    spans = []
    pos = 0
    n = len(text)
    w = len(word)
    while True:
        i = text.find(word, pos)
        if i < 0:
            break
        before_ok = i == 0 or not _is_word_char(text[i - 1])
        after_ok = i + w == n or not _is_word_char(text[i + w])
        if before_ok and after_ok:
            spans.append((i, i + w))
            pos = i + w
        else:
            pos = i + 1
    return spans


def _phrase_matches(text: str, phrase: str) -> list[tuple[int, int]]:
    """Substring occurrences of ``phrase``, leftmost non-overlapping."""
    spans = []
    pos = 0
    while True:
        i = text.find(phrase, pos)
        if i < 0:
            break
        spans.append((i, i + len(phrase)))
        pos = i + len(phrase)
    return spans


def _collect(metric: str, text: str, cues: Iterable[str], offset: int = 0) -> list[CueMatch]:
    found = []
    for cue in cues:
        for start, end in _phrase_matches(text, cue):
            found.append(CueMatch(metric, cue, start + offset, end + offset))
    return found


def score_afl(text: "str | ExplanationText", answer: AnswerLabel | None) -> float:
    return _afl(_coerce(text), answer)[0]


def _afl(e: ExplanationText, answer: AnswerLabel | None) -> tuple[float, list[CueMatch]]:
    if answer is None:
        return 0.0, []
    token = answer.value
    norm = e.normalized
    head = norm[:HEAD_TAIL_WINDOW]
    tail_start = max(0, len(norm) - HEAD_TAIL_WINDOW)
    tail = norm[tail_start:]

    matches = []
    head_hits = _word_matches(head, token)
    tail_hits = _word_matches(tail, token)
    for start, end in head_hits:
        matches.append(CueMatch("afl", token, start, end))
    for start, end in tail_hits:
        matches.append(CueMatch("afl", token, start + tail_start, end + tail_start))

    if head_hits and tail_hits:
        return 1.0, matches
    if head_hits or tail_hits:
        return 0.5, matches
    return 0.0, matches


def score_ac(text: "str | ExplanationText", answer: AnswerLabel | None, cues: CueSet | None = None) -> float:
    return _ac(_coerce(text), answer, cues or default_cues())[0]


def _ac(e: ExplanationText, answer: AnswerLabel | None, cues: CueSet) -> tuple[float, list[CueMatch]]:
    norm = e.normalized
    strong = _collect("ac", norm, cues.expanded_strong_patterns())
    if strong:
        return 1.0, strong
    medium = _collect("ac", norm, cues.expanded_medium_patterns())
    if medium:
        return 0.7, medium
    if answer is not None:
        anywhere = _word_matches(norm, answer.value)
        if anywhere:
            return 0.3, [CueMatch("ac", answer.value, s, t) for s, t in anywhere]
    return 0.0, []


def score_ci(text: "str | ExplanationText", cues: CueSet | None = None) -> float:
    return _ci(_coerce(text), cues or default_cues())[0]


def _ci(e: ExplanationText, cues: CueSet) -> tuple[float, list[CueMatch]]:
    norm = e.normalized
    headers = _collect("ci", norm, cues.conclusion_headers)
    if headers:
        return 1.0, headers
    markers = _collect("ci", norm, cues.conclusion_markers)
    if markers:
        return 0.6, markers
    return 0.0, []


def score_dtc(
    text: "str | ExplanationText",
    terms: "Sequence[str] | LexiconSet | None",
    count_unique: bool = False,
) -> float:
    return _dtc(_coerce(text), terms, count_unique)[0]


def _dtc(
    e: ExplanationText,
    terms: "Sequence[str] | LexiconSet | None",
    count_unique: bool,
) -> tuple[float, list[CueMatch]]:
    if isinstance(terms, LexiconSet):
        terms = terms.terms or None
    if terms is None:
        return 0.5, []
    norm = e.normalized
    matches = _collect("dtc", norm, terms)
    if count_unique:
        count = len({m.cue for m in matches})
    else:
        count = len(matches)
    if count >= 5:
        return 1.0, matches
    if count >= 3:
        return 0.8, matches
    if count >= 1:
        return 0.5, matches
    return 0.2, matches


def score_cea(text: "str | ExplanationText", cues: CueSet | None = None) -> float:
    return _cea(_coerce(text), cues or default_cues())[0]


def _cea(e: ExplanationText, cues: CueSet) -> tuple[float, list[CueMatch]]:
    norm = e.normalized
    links = _collect("cea", norm, cues.link_cues)
    analyses = _collect("cea", norm, cues.analysis_cues)
    link_count = len(links)
    analysis_count = len(analyses)
    matches = links + analyses
    if link_count >= 3 and analysis_count >= 1:
        return 1.0, matches
    if link_count >= 2:
        return 0.8, matches
    if link_count >= 1:
        return 0.5, matches
    if analysis_count >= 1:
        return 0.3, matches
    return 0.0, matches


def _number_spans(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _NUMBER_RE.finditer(text)]


def _quote_spans(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _QUOTE_RE.finditer(text)]


def score_fs(text: "str | ExplanationText", cues: CueSet | None = None) -> float:
    return _fs(_coerce(text), cues or default_cues())[0]


def _fs(e: ExplanationText, cues: CueSet) -> tuple[float, list[CueMatch]]:
    norm = e.normalized
    matches = [CueMatch("fs", "number", s, t) for s, t in _number_spans(norm)]
    matches += [CueMatch("fs", "quote", s, t) for s, t in _quote_spans(norm)]
    matches += _collect("fs", norm, cues.specificity_cues)
    specificity = len(matches)
    hedges = _collect("fs", norm, cues.vagueness_cues)
    vagueness = len(hedges)
    matches += hedges
    if specificity >= 4 and vagueness <= 1:
        return 1.0, matches
    if specificity >= 3:
        return 0.8, matches
    if specificity >= 2:
        return 0.6, matches
    if specificity >= 1:
        return 0.4, matches
    return 0.2, matches


def score_all(
    text: "str | ExplanationText",
    answer: AnswerLabel | None,
    terms: "Sequence[str] | LexiconSet | None" = None,
    cues: CueSet | None = None,
    count_unique: bool = False,
) -> tuple[MetricVector, list[CueMatch]]:
    """Score all six metrics independently and collect fired-cue diagnostics.

    ``answer`` may be None (e.g. for outputs where no answer could be
    extracted); the answer-dependent branches then simply do not fire.
    """
    e = _coerce(text)
    cue_set = cues or default_cues()

    afl, d_afl = _afl(e, answer)
    ac, d_ac = _ac(e, answer, cue_set)
    ci, d_ci = _ci(e, cue_set)
    dtc, d_dtc = _dtc(e, terms, count_unique)
    cea, d_cea = _cea(e, cue_set)
    fs, d_fs = _fs(e, cue_set)

    vector = MetricVector(afl=afl, ac=ac, ci=ci, dtc=dtc, cea=cea, fs=fs)
    return vector, d_afl + d_ac + d_ci + d_dtc + d_cea + d_fs
