"""Domain term lists and cue sets that parameterize the scoring rules.

The file format is plain UTF-8 text:

    schema_version = 1

    [lexicon legal]
    hearsay            # extension
    ...

    [cues link_cues]
    based on           # core

One entry per line. ``#`` starts a comment; a trailing ``# core`` or
``# extension`` comment records whether the entry is required by the
embedded manifest or is a curated addition. Entries are lowercased on
load. Answer-pattern entries may contain a single ``{label}``
placeholder which is expanded to both "yes" and "no" for matching.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import LexiconError

logger = logging.getLogger(__name__)

DOMAINS = ("legal", "medical", "financial")

CUE_LIST_NAMES = (
    "link_cues",
    "analysis_cues",
    "specificity_cues",
    "vagueness_cues",
    "strong_answer_patterns",
    "medium_answer_patterns",
    "conclusion_headers",
    "conclusion_markers",
)

# Entries every cue file must carry, each in exactly this list.
REQUIRED_CUES = {
    "link_cues": ("based on", "according to", "this suggests"),
    "analysis_cues": ("analysis:",),
    "specificity_cues": ("first", "second", "key facts"),
    "vagueness_cues": ("generally", "possibly"),
    "strong_answer_patterns": (
        "my answer is: {label}",
        "final answer: {label}",
        "the answer is: {label}",
        "answer: {label}",
    ),
    "medium_answer_patterns": ("therefore, {label}", "in conclusion, {label}"),
    "conclusion_headers": ("conclusion:",),
    "conclusion_markers": ("in conclusion", "to conclude", "in summary", "therefore", "thus"),
}

_LABELS = ("yes", "no")


@dataclass(frozen=True)
class LexiconSet:
    """Term list for one domain; ``domain="none"`` means no lexicon."""

    domain: str
    terms: tuple[str, ...]
    version: str

    def __post_init__(self):
        if self.domain == "none" and self.terms:
            raise LexiconError("domain 'none' must have an empty term list")


@dataclass(frozen=True)
class CueSet:
    link_cues: tuple[str, ...]
    analysis_cues: tuple[str, ...]
    specificity_cues: tuple[str, ...]
    vagueness_cues: tuple[str, ...]
    strong_answer_patterns: tuple[str, ...]
    medium_answer_patterns: tuple[str, ...]
    conclusion_headers: tuple[str, ...]
    conclusion_markers: tuple[str, ...]
    version: str

    def list_named(self, name: str) -> tuple[str, ...]:
        if name not in CUE_LIST_NAMES:
            raise LexiconError(f"unknown cue list: {name}")
        return getattr(self, name)

    def expanded_strong_patterns(self) -> tuple[str, ...]:
        return _expand_labels(self.strong_answer_patterns)

    def expanded_medium_patterns(self) -> tuple[str, ...]:
        return _expand_labels(self.medium_answer_patterns)


def _expand_labels(patterns: tuple[str, ...]) -> tuple[str, ...]:
    out: list[str] = []
    for pat in patterns:
        if "{label}" in pat:
            out.extend(pat.replace("{label}", lab) for lab in _LABELS)
        else:
            out.append(pat)
    return tuple(out)


@dataclass
class LexiconFile:
    """Parsed contents of one lexicon/cue file."""

    version: str
    lexicons: dict[str, LexiconSet]
    cues: CueSet
    provenance: dict[tuple[str, str], str] = field(default_factory=dict)

    def for_domain(self, domain: str) -> LexiconSet:
        if domain == "none":
            return LexiconSet(domain="none", terms=(), version=self.version)
        try:
            return self.lexicons[domain]
        except KeyError:
            raise LexiconError(f"no lexicon for domain {domain!r}")

    def serialize(self) -> str:
        lines = [f"schema_version = {self.version}", ""]
        for domain in DOMAINS:
            if domain not in self.lexicons:
                continue
            lines.append(f"[lexicon {domain}]")
            for term in self.lexicons[domain].terms:
                marker = self.provenance.get((f"lexicon {domain}", term), "extension")
                lines.append(f"{term}  # {marker}")
            lines.append("")
        for name in CUE_LIST_NAMES:
            lines.append(f"[cues {name}]")
            for cue in self.cues.list_named(name):
                marker = self.provenance.get((f"cues {name}", cue), "extension")
                lines.append(f"{cue}  # {marker}")
            lines.append("")
        return "\n".join(lines)


def load_lexicons(path: str | Path) -> LexiconFile:
    """Load and validate a lexicon/cue file; errors carry line numbers."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file: {exc}", path=str(path))
    return parse_lexicons(text, source=str(path))


def parse_lexicons(text: str, source: str = "<string>") -> LexiconFile:
    version: str | None = None
    section: str | None = None
    sections: dict[str, list[str]] = {}
    section_lines: dict[tuple[str, str], int] = {}
    provenance: dict[tuple[str, str], str] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            header = line[1:-1].strip().lower()
            parts = header.split()
            if len(parts) != 2 or parts[0] not in ("lexicon", "cues"):
                raise LexiconError(f"bad section header {line!r}", path=source, line=lineno)
            kind, name = parts
            if kind == "lexicon" and name not in DOMAINS:
                raise LexiconError(f"unknown lexicon domain {name!r}", path=source, line=lineno)
            if kind == "cues" and name not in CUE_LIST_NAMES:
                raise LexiconError(f"unknown cue list {name!r}", path=source, line=lineno)
            section = f"{kind} {name}"
            sections.setdefault(section, [])
            continue
        if section is None:
            if "=" in line:
                key, _, value = line.partition("=")
                if key.strip() == "schema_version":
                    version = value.strip()
                    continue
            raise LexiconError(f"unexpected line before first section: {line!r}", path=source, line=lineno)

        entry, _, comment = line.partition("#")
        entry = entry.strip().lower()
        marker = comment.strip().lower() or "extension"
        if not entry:
            raise LexiconError("empty entry", path=source, line=lineno)
        if entry in sections[section]:
            raise LexiconError(f"duplicate entry {entry!r} in [{section}]", path=source, line=lineno)
        sections[section].append(entry)
        section_lines[(section, entry)] = lineno
        provenance[(section, entry)] = marker if marker in ("core", "extension") else "extension"

    if version is None:
        raise LexiconError("missing mandatory 'schema_version' field", path=source)

    lexicons = {
        domain: LexiconSet(domain=domain, terms=tuple(sections.get(f"lexicon {domain}", ())), version=version)
        for domain in DOMAINS
        if f"lexicon {domain}" in sections
    }

    cue_lists = {name: tuple(sections.get(f"cues {name}", ())) for name in CUE_LIST_NAMES}
    cues = CueSet(version=version, **cue_lists)

    _validate_cues(cues, source, section_lines)
    return LexiconFile(version=version, lexicons=lexicons, cues=cues, provenance=provenance)


def _validate_cues(cues: CueSet, source: str, section_lines: dict[tuple[str, str], int]) -> None:
    for name, required in REQUIRED_CUES.items():
        have = set(cues.list_named(name))
        for entry in required:
            if entry not in have:
                raise LexiconError(f"required entry {entry!r} missing from [cues {name}]", path=source)

    seen: dict[str, str] = {}
    for name in CUE_LIST_NAMES:
        for cue in cues.list_named(name):
            if cue in seen:
                line = section_lines.get((f"cues {name}", cue))
                raise LexiconError(
                    f"cue {cue!r} appears in both [cues {seen[cue]}] and [cues {name}]",
                    path=source,
                    line=line,
                )
            seen[cue] = name


_DEFAULTS: LexiconFile | None = None


def default_lexicons() -> LexiconFile:
    """The validated cue/lexicon defaults shipped with the package."""
    global _DEFAULTS
    if _DEFAULTS is None:
        text = resources.files("sefeval.data").joinpath("default_lexicons.txt").read_text(encoding="utf-8")
        _DEFAULTS = parse_lexicons(text, source="sefeval.data/default_lexicons.txt")
    return _DEFAULTS


def default_cues() -> CueSet:
    return default_lexicons().cues
