"""Extraction and validation of model score output.

Models are instructed to reply with a bare JSON object keyed ``"Score"``,
but frequently wrap it in prose anyway; extraction therefore scans for the
first balanced object instead of trusting the whole response.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum


class ScoreParseError(ValueError):
    """Base class for score-extraction failures."""


class NoJsonObjectError(ScoreParseError):
    """The response contains no parseable JSON object."""


class MissingScoreError(ScoreParseError):
    """The JSON object has no "Score" key."""


class NotNumericError(ScoreParseError):
    """The score value is neither a number nor a numeric string."""


class ScoreOutOfRangeError(ScoreParseError):
    """The numeric score lies outside [0, 1]."""


class UnknownCategoryError(ScoreParseError):
    """The categorical score is not one of the five known labels."""


class FitCategory(Enum):
    NEAR_IMPOSSIBLE = "Near-Impossible"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    NEAR_PERFECT = "Near-Perfect"


CATEGORY_VALUES: dict[FitCategory, float] = {
    FitCategory.NEAR_IMPOSSIBLE: 0.0,
    FitCategory.LOW: 0.25,
    FitCategory.MEDIUM: 0.5,
    FitCategory.HIGH: 0.75,
    FitCategory.NEAR_PERFECT: 1.0,
}


class ScoreSource(Enum):
    """How a score outcome was derived."""

    NUMERIC_DIRECT = "NumericDirect"
    CATEGORICAL_MAPPED = "CategoricalMapped"
    SENTENCE_AVERAGED = "SentenceAveraged"
    BACKOFF_NUMERIC = "BackoffNumeric"
    BACKOFF_CATEGORICAL = "BackoffCategorical"


def extract_json(text: str) -> dict:
    """Return the first balanced ``{...}`` region that parses as a JSON object.

    Surrounding prose is ignored. Raises :class:`NoJsonObjectError` when no
    candidate region parses.
    """
    decoder = json.JSONDecoder()
    start = text.find("{")
    while start != -1:
        try:
            parsed, _ = decoder.raw_decode(text, start)
        except json.JSONDecodeError:
            start = text.find("{", start + 1)
            continue
        if isinstance(parsed, dict):
            return parsed
        start = text.find("{", start + 1)
    raise NoJsonObjectError(f"no JSON object in response: {text[:120]!r}")


def _score_value(obj: dict):
    if "Score" not in obj:
        raise MissingScoreError(f"JSON object has no 'Score' key: {obj!r}")
    return obj["Score"]


def parse_numeric(obj: dict) -> float:
    """Read a numeric score in [0, 1] from an extracted object.

    String-encoded numbers are accepted; models quote them often enough that
    rejecting "0.75" would throw away valid answers.
    """
    raw = _score_value(obj)
    if isinstance(raw, bool):
        raise NotNumericError(f"score is a boolean, not a number: {raw!r}")
    if isinstance(raw, (int, float)):
        value = float(raw)
    elif isinstance(raw, str):
        try:
            value = float(raw.strip())
        except ValueError:
            raise NotNumericError(f"score is not numeric: {raw!r}") from None
    else:
        raise NotNumericError(f"score is not numeric: {raw!r}")
    if not 0.0 <= value <= 1.0:
        raise ScoreOutOfRangeError(f"score {value} outside [0, 1]")
    return value


def parse_categorical(obj: dict) -> FitCategory:
    """Read one of the five fit labels, case-insensitively. No fuzzy matching."""
    raw = _score_value(obj)
    if not isinstance(raw, str):
        raise UnknownCategoryError(f"categorical score is not a string: {raw!r}")
    needle = raw.strip().lower()
    for category in FitCategory:
        if category.value.lower() == needle:
            return category
    raise UnknownCategoryError(f"unknown category {raw!r}")


def category_value(category: FitCategory) -> float:
    """Map a fit label to its numeric equivalent."""
    return CATEGORY_VALUES[category]


def nearest_category(value: float) -> FitCategory:
    """Fit label whose numeric equivalent is closest to ``value``."""
    return min(CATEGORY_VALUES, key=lambda c: abs(CATEGORY_VALUES[c] - value))


def average(values: list[float]) -> float:
    """Arithmetic mean of a nonempty list."""
    if not values:
        raise ValueError("cannot average an empty list")
    return sum(values) / len(values)


@dataclass(frozen=True)
class ScoreOutcome:
    """Model-derived fit score for one item, with provenance.

    ``components`` holds the per-sentence values when the score is an average
    over generated-sentence runs; ``reasoning_texts`` the intermediate step
    responses for step-by-step chains. ``annotation`` is a free slot for
    manual reasoning labels and stays empty unless a reviewer fills it.
    """

    item_id: str
    value: float
    source: ScoreSource
    raw_text: str
    components: tuple[float, ...] | None = None
    reasoning_texts: tuple[str, ...] | None = None
    annotation: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"outcome value {self.value} outside [0, 1]")
        if self.source == ScoreSource.SENTENCE_AVERAGED:
            if not self.components:
                raise ValueError("sentence-averaged outcome requires components")
            if self.value != average(list(self.components)):
                raise ValueError("sentence-averaged value must equal the mean of its components")

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "value": self.value,
            "source": self.source.value,
            "raw_text": self.raw_text,
            "components": list(self.components) if self.components is not None else None,
            "reasoning_texts": list(self.reasoning_texts) if self.reasoning_texts is not None else None,
            "annotation": self.annotation,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ScoreOutcome":
        return cls(
            item_id=payload["item_id"],
            value=payload["value"],
            source=ScoreSource(payload["source"]),
            raw_text=payload["raw_text"],
            components=tuple(payload["components"]) if payload.get("components") is not None else None,
            reasoning_texts=(
                tuple(payload["reasoning_texts"])
                if payload.get("reasoning_texts") is not None
                else None
            ),
            annotation=payload.get("annotation"),
        )
