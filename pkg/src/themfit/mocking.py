"""Deterministic in-process backends for offline runs, tests, and cassettes.

The norm-echo backend infers the request kind from the prompt text and
answers from the dataset itself: scoring prompts get the item's normalized
human rating back (optionally transformed), generation prompts get five
synthetic sentences, verification prompts get a scripted verdict. A run
against it should therefore correlate perfectly with the human ratings,
which makes ``--mode mock`` a pipeline self-test.
"""

from __future__ import annotations

import json
import logging
import re
from typing import Callable, Sequence

from .codec import nearest_category
from .gateway import BackendError, FinishReason, Message, ModelParams
from .norms import Dataset, normalize_rating

logger = logging.getLogger(__name__)

_ROLE_PATTERN = r"(?:PropBank )?(Arg0|Arg1|Arg2|Instrument|Location)"
_GENERATE_RE = re.compile(
    rf"where the {_ROLE_PATTERN} of the predicate '([^']+)' is '([^']+)'"
)
_SCORE_RE = re.compile(
    rf"the predicate '([^']+)', how much does the argument '([^']+)' fit the role of {_ROLE_PATTERN}"
)
_VARIANT_RE = re.compile(r"sentence variant (\d+)")

# Coherence policies: every candidate passes, none do, or only the first k.
CoherencePolicy = Callable[[int], bool]


def always_coherent(_: int) -> bool:
    return True


def never_coherent(_: int) -> bool:
    return False


def first_k_coherent(k: int) -> CoherencePolicy:
    return lambda index: index < k


class NormEchoBackend:
    """Backend that echoes each item's normalized human rating as its score.

    ``transform`` post-processes the normalized rating (identity by default;
    pass ``lambda v: 1 - v`` for an antitone run). ``coherence`` decides the
    verdict for the k-th generated sentence (0-based).
    """

    def __init__(
        self,
        dataset: Dataset | Sequence[Dataset],
        transform: Callable[[float], float] | None = None,
        coherence: CoherencePolicy = always_coherent,
    ):
        datasets = [dataset] if isinstance(dataset, Dataset) else list(dataset)
        self._ratings: dict[tuple[str, str, str], float] = {}
        for ds in datasets:
            for item in ds.items:
                key = (item.predicate, item.argument, item.role.value)
                value = normalize_rating(item.human_rating, item.scale)
                if key in self._ratings and self._ratings[key] != value:
                    # Scoring prompts carry no dataset marker, so a cross-dataset
                    # rating conflict cannot be disambiguated; first one wins.
                    logger.warning(
                        "norm-echo backend: conflicting ratings for %s across datasets; "
                        "keeping the first (self-test rho will be distorted)",
                        key,
                    )
                    continue
                self._ratings[key] = value
        self._transform = transform or (lambda value: value)
        self._coherence = coherence

    def send(self, messages: Sequence[Message], params: ModelParams) -> tuple[str, FinishReason]:
        prompt = messages[-1].text
        if "Generate 5 different natural sentences" in prompt:
            return self._generate(prompt), FinishReason.STOP
        if '"Coherent"' in prompt:
            return self._verify(prompt), FinishReason.STOP
        if '"Score"' in prompt:
            return self._score(prompt), FinishReason.STOP
        return self._reason(prompt), FinishReason.STOP

    def _lookup(self, predicate: str, argument: str, role: str) -> float:
        key = (predicate, argument, role)
        if key not in self._ratings:
            raise BackendError(f"norm-echo backend knows no item {key}")
        return self._transform(self._ratings[key])

    def _generate(self, prompt: str) -> str:
        match = _GENERATE_RE.search(prompt)
        if not match:
            raise BackendError("norm-echo backend cannot parse generation prompt")
        role, predicate, argument = match.groups()
        lines = [
            f"{k}. In sentence variant {k}, the {argument} serves as the {role} of {predicate}."
            for k in range(1, 6)
        ]
        return "\n".join(lines)

    def _verify(self, prompt: str) -> str:
        match = _VARIANT_RE.search(prompt)
        index = int(match.group(1)) - 1 if match else 0
        verdict = "true" if self._coherence(index) else "false"
        return f'{{"Coherent": {verdict}}}'

    def _score(self, prompt: str) -> str:
        match = _SCORE_RE.search(prompt)
        if not match:
            raise BackendError("norm-echo backend cannot parse scoring prompt")
        predicate, argument, role = match.groups()
        value = self._lookup(predicate, argument, role)
        if "'Near-Perfect'" in prompt:
            label = nearest_category(value).value
            return json.dumps({"Score": label})
        return json.dumps({"Score": round(value, 10)})

    def _reason(self, prompt: str) -> str:
        return (
            "The role calls for typical participants of the event, and the "
            "argument's salient properties bear on how well it fills that role."
        )
