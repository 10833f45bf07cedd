"""Keyword-overlap passage retrieval for the retrieval-augmented baselines."""

from __future__ import annotations

import re

_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")
_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Small fixed stopword list; kept deliberately short so domain words survive.
STOPWORDS = frozenset(
    "a an and are as at be but by do does did for from had has have if in is it "
    "its of on or that the this to was were what when where which who whom why "
    "will with how not".split()
)


def split_passages(context: str) -> list[str]:
    """Sentence-boundary split: terminal punctuation followed by whitespace."""
    parts = [p.strip() for p in _SENTENCE_RE.split(context)]
    return [p for p in parts if p]


def _keywords(text: str) -> set[str]:
    return {t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS}


def overlap_score(passage: str, question: str) -> int:
    """Shared keyword types between passage and question."""
    return len(_keywords(passage) & _keywords(question))


def retrieve_passages(context: str, question: str, k: int = 3) -> list[str]:
    """Top-k passages by keyword overlap, descending; ties keep original order."""
    passages = split_passages(context)
    if len(passages) <= k:
        return passages
    question_keys = _keywords(question)
    scored = [(len(_keywords(p) & question_keys), i, p) for i, p in enumerate(passages)]
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [p for _, _, p in scored[:k]]
