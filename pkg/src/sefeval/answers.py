"""Binary answer labels and case-normalized parsing."""

from __future__ import annotations

from enum import Enum


class AnswerLabel(Enum):
    YES = "yes"
    NO = "no"

    @classmethod
    def parse(cls, value: str) -> "AnswerLabel":
        """Parse "yes"/"Yes"/"YES" (and the "no" variants) into a label."""
        normalized = value.strip().lower()
        for label in cls:
            if normalized == label.value:
                return label
        raise ValueError(f"not a yes/no answer label: {value!r}")

    @classmethod
    def try_parse(cls, value: str) -> "AnswerLabel | None":
        try:
            return cls.parse(value)
        except ValueError:
            return None

    def __str__(self) -> str:
        return self.value
