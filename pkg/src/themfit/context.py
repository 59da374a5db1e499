"""Generated-sentence contexts: generation, coherence checks, backoff.

For sentence-input configs the harness asks the model for five candidate
sentences per item, then has the model verify each candidate actually uses
the argument in the requested role. Verification fails closed: a verdict
that does not parse counts as incoherent, which biases toward the safer
lemma-tuple backoff. Backoff triggers exactly when no candidate survives.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

from .codec import extract_json, ScoreParseError
from .gateway import Gateway, Message, ModelParams, ModelResponse
from .norms import NormItem
from .prompts import MAX_TOKENS_SENTENCE, render_template, role_display

MAX_CANDIDATES = 5

# Callback for transcript writing: (phase, request_messages, response,
# parsed_result, candidate_index) with candidate_index None for generation.
Recorder = Callable[[str, list[Message], ModelResponse, object, "int | None"], None]

_LIST_LINE = re.compile(r"^\s*(?:\d+[.)]\s+|[-*]\s+)(.+?)\s*$")


@dataclass(frozen=True)
class CandidateSentence:
    """One generated sentence with its coherence verdict and raw verdict text."""

    text: str
    coherent: bool
    verdict_raw: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("candidate sentence text must be nonempty")


@dataclass(frozen=True)
class ContextSet:
    """All candidates for an item plus the usable subset and backoff flag."""

    item_id: str
    candidates: tuple[CandidateSentence, ...]
    usable: tuple[str, ...]
    backoff: bool

    def __post_init__(self) -> None:
        if len(self.candidates) > MAX_CANDIDATES:
            raise ValueError(f"at most {MAX_CANDIDATES} candidates allowed")
        texts = {c.text for c in self.candidates}
        if any(u not in texts for u in self.usable):
            raise ValueError("every usable sentence must appear among the candidates")
        if self.backoff != (not self.usable):
            raise ValueError("backoff must hold exactly when no sentence is usable")

    @property
    def incoherent_count(self) -> int:
        return sum(1 for c in self.candidates if not c.coherent)


def generation_params(params: ModelParams) -> ModelParams:
    """Generation and verification run in the sentence-input token regime."""
    return replace(params, max_tokens=MAX_TOKENS_SENTENCE)


def parse_sentence_list(text: str) -> list[str]:
    """Pull up to five sentences out of a numbered, bulleted, or JSON list.

    Prose without list structure yields an empty list, which triggers
    backoff upstream.
    """
    sentences: list[str] = []
    for line in text.splitlines():
        match = _LIST_LINE.match(line)
        if match and match.group(1):
            sentences.append(match.group(1))
    if not sentences:
        try:
            parsed = json.loads(text.strip())
        except json.JSONDecodeError:
            parsed = None
        if isinstance(parsed, list):
            sentences = [s.strip() for s in parsed if isinstance(s, str) and s.strip()]
    return sentences[:MAX_CANDIDATES]


def generate_sentences(
    item: NormItem,
    gateway: Gateway,
    params: ModelParams,
    recorder: Recorder | None = None,
) -> list[str]:
    """Ask for five sentences using the argument in the item's role."""
    prompt = render_template(
        "generate_sentences",
        predicate=item.predicate,
        argument=item.argument,
        role=role_display(item.role, False),
    )
    request = [Message("user", prompt)]
    response = gateway.complete(request, params)
    sentences = parse_sentence_list(response.text)
    if recorder is not None:
        recorder("Generate", request, response, sentences, None)
    return sentences


def _parse_verdict(text: str) -> bool:
    try:
        obj = extract_json(text)
    except ScoreParseError:
        return False
    verdict = obj.get("Coherent")
    if verdict is True:
        return True
    if isinstance(verdict, str) and verdict.strip().lower() == "true":
        return True
    return False


def verify_coherence(
    sentence: str,
    item: NormItem,
    gateway: Gateway,
    params: ModelParams,
    recorder: Recorder | None = None,
    candidate_index: int | None = None,
) -> CandidateSentence:
    """Model-judged check that the sentence uses the argument in the stated role."""
    if not sentence:
        raise ValueError("sentence must be nonempty")
    question = render_template(
        "verify_question",
        predicate=item.predicate,
        argument=item.argument,
        role=role_display(item.role, False),
        sentence=sentence,
    )
    prompt = question + "\n" + render_template("verify_instruction")
    request = [Message("user", prompt)]
    response = gateway.complete(request, params)
    coherent = _parse_verdict(response.text)
    if recorder is not None:
        recorder("Verify", request, response, coherent, candidate_index)
    return CandidateSentence(text=sentence, coherent=coherent, verdict_raw=response.text)


def build_context(
    item: NormItem,
    gateway: Gateway,
    params: ModelParams,
    recorder: Recorder | None = None,
) -> ContextSet:
    """Generate candidates, verify each, and assemble the usable subset.

    Verification calls may run concurrently under the gateway's in-flight
    bound; candidates are reassembled by index so the output is
    order-deterministic. Gateway failures propagate (the item fails rather
    than backing off).
    """
    sentences = generate_sentences(item, gateway, params, recorder)
    if not sentences:
        return ContextSet(item_id=item.item_id, candidates=(), usable=(), backoff=True)

    def verify(indexed: tuple[int, str]) -> tuple[int, CandidateSentence]:
        index, sentence = indexed
        return index, verify_coherence(sentence, item, gateway, params, recorder, index)

    if len(sentences) == 1:
        results = [verify((0, sentences[0]))]
    else:
        with ThreadPoolExecutor(max_workers=min(len(sentences), gateway.max_in_flight)) as pool:
            results = list(pool.map(verify, enumerate(sentences)))
    candidates = tuple(c for _, c in sorted(results, key=lambda pair: pair[0]))
    usable = tuple(c.text for c in candidates if c.coherent)
    return ContextSet(
        item_id=item.item_id,
        candidates=candidates,
        usable=usable,
        backoff=not usable,
    )
