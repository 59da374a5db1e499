"""Prompt chain rendering for the eight experiment configurations.

Rendering is pure: equal (item, config, sentence) inputs yield identical
chains. Template texts live as plain-text fixture files under
``templates/`` with ``{predicate} {argument} {role} {sentence}``
placeholders; instruction blocks contain literal braces and are therefore
stored as verbatim files that are never formatted. All templates are
load-verified once per process.

``step1_lemma_verbatim.txt`` preserves the original wording of the first
reasoning prompt, which contains the stray "the its"; the renderer uses the
corrected ``step1_lemma.txt``. Both are kept so the divergence is on record.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from string import Formatter

from .gateway import ModelParams
from .norms import NormItem, Role


class TemplateError(RuntimeError):
    """A template file is missing or its placeholders do not match."""


class ReasoningForm(Enum):
    SIMPLE = "simple"
    STEP_BY_STEP = "step_by_step"


class InputForm(Enum):
    LEMMA_TUPLE = "lemma_tuple"
    GENERATED_SENTENCE = "generated_sentence"


class OutputForm(Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class Expects(Enum):
    """What kind of reply a chain step anticipates."""

    FREE_TEXT = "free_text"
    SCORE_JSON = "score_json"
    COHERENCE_JSON = "coherence_json"
    SENTENCE_LIST = "sentence_list"


EXPERIMENT_IDS = ("1.1", "1.2", "2.1", "2.2", "3.1", "3.2", "4.1", "4.2")

_AXES_BY_FIRST_DIGIT = {
    "1": (ReasoningForm.SIMPLE, InputForm.LEMMA_TUPLE),
    "2": (ReasoningForm.SIMPLE, InputForm.GENERATED_SENTENCE),
    "3": (ReasoningForm.STEP_BY_STEP, InputForm.LEMMA_TUPLE),
    "4": (ReasoningForm.STEP_BY_STEP, InputForm.GENERATED_SENTENCE),
}
_OUTPUT_BY_SECOND_DIGIT = {
    "1": OutputForm.NUMERIC,
    "2": OutputForm.CATEGORICAL,
}

# Scoring-step token budgets per regime: step-by-step chains need room for
# the reasoning context; sentence inputs lengthen prompts and replies.
MAX_TOKENS_LEMMA_SIMPLE = 100
MAX_TOKENS_SENTENCE = 300
MAX_TOKENS_STEP = 600


def default_max_tokens(reasoning: ReasoningForm, input_form: InputForm) -> int:
    if reasoning == ReasoningForm.STEP_BY_STEP:
        return MAX_TOKENS_STEP
    if input_form == InputForm.GENERATED_SENTENCE:
        return MAX_TOKENS_SENTENCE
    return MAX_TOKENS_LEMMA_SIMPLE


@dataclass(frozen=True)
class ExperimentConfig:
    """One cell of the 2x2x2 grid plus model parameters and options."""

    experiment_id: str
    reasoning: ReasoningForm
    input: InputForm
    output: OutputForm
    propbank_prefix: bool
    model_params: ModelParams

    def __post_init__(self) -> None:
        if self.experiment_id not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment id {self.experiment_id!r}")
        first, second = self.experiment_id.split(".")
        reasoning, input_form = _AXES_BY_FIRST_DIGIT[first]
        output = _OUTPUT_BY_SECOND_DIGIT[second]
        if (self.reasoning, self.input, self.output) != (reasoning, input_form, output):
            raise ValueError(
                f"axes {self.reasoning}/{self.input}/{self.output} do not match "
                f"experiment id {self.experiment_id}"
            )

    @classmethod
    def from_id(
        cls,
        experiment_id: str,
        *,
        model_name: str = "mock",
        propbank_prefix: bool = False,
        temperature: float = 0.0,
        top_p: float = 0.95,
        max_tokens: int | None = None,
    ) -> "ExperimentConfig":
        """Build a config from its grid id, with regime-default max_tokens."""
        if experiment_id not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment id {experiment_id!r}")
        first, second = experiment_id.split(".")
        reasoning, input_form = _AXES_BY_FIRST_DIGIT[first]
        output = _OUTPUT_BY_SECOND_DIGIT[second]
        params = ModelParams(
            model_name=model_name,
            temperature=temperature,
            top_p=top_p,
            max_tokens=max_tokens or default_max_tokens(reasoning, input_form),
        )
        return cls(
            experiment_id=experiment_id,
            reasoning=reasoning,
            input=input_form,
            output=output,
            propbank_prefix=propbank_prefix,
            model_params=params,
        )


@dataclass(frozen=True)
class ChainStep:
    step_index: int
    template_id: str
    rendered_text: str
    expects: Expects

    def __post_init__(self) -> None:
        if not self.rendered_text:
            raise ValueError("rendered_text must be nonempty")


@dataclass(frozen=True)
class PromptChain:
    steps: tuple[ChainStep, ...]
    context_sentence: str | None = None

    def __post_init__(self) -> None:
        scoring = sum(1 for s in self.steps if s.expects == Expects.SCORE_JSON)
        if len(self.steps) not in (1, 4) or scoring != 1:
            raise ValueError(
                f"chain must have 1 or 4 steps with exactly one scoring step, "
                f"got {len(self.steps)} steps / {scoring} scoring"
            )
        if self.context_sentence is not None:
            for step in self.steps:
                if self.context_sentence not in step.rendered_text:
                    raise ValueError(
                        f"step {step.step_index} does not embed the context sentence"
                    )

    @property
    def scoring_step(self) -> ChainStep:
        return self.steps[-1]


# Placeholder sets per template; None marks a verbatim file (instruction
# blocks contain literal JSON braces and must never pass through format()).
_TEMPLATE_FIELDS: dict[str, frozenset[str] | None] = {
    "simple_score_lemma": frozenset({"predicate", "argument", "role"}),
    "simple_score_sentence": frozenset({"predicate", "argument", "role", "sentence"}),
    "step1_lemma": frozenset({"predicate", "role"}),
    "step1_lemma_verbatim": frozenset({"predicate", "role"}),
    "step2_lemma": frozenset({"predicate", "argument", "role"}),
    "step3_lemma": frozenset({"predicate", "argument", "role"}),
    "step1_sentence": frozenset({"predicate", "role", "sentence"}),
    "step2_sentence": frozenset({"predicate", "argument", "role", "sentence"}),
    "step3_sentence": frozenset({"predicate", "argument", "role", "sentence"}),
    "generate_sentences": frozenset({"predicate", "argument", "role"}),
    "verify_question": frozenset({"predicate", "argument", "role", "sentence"}),
    "output_numeric": None,
    "output_categorical": None,
    "verify_instruction": None,
}


def _placeholders(text: str) -> set[str]:
    return {field for _, field, _, _ in Formatter().parse(text) if field}


@lru_cache(maxsize=1)
def load_templates() -> dict[str, str]:
    """Read and verify every template file; called once per process."""
    root = resources.files("themfit") / "templates"
    templates: dict[str, str] = {}
    for name, fields in _TEMPLATE_FIELDS.items():
        path = root / f"{name}.txt"
        try:
            text = path.read_text(encoding="utf-8").rstrip("\n")
        except (FileNotFoundError, OSError) as exc:
            raise TemplateError(f"template file missing: {name}.txt") from exc
        if not text:
            raise TemplateError(f"template {name}.txt is empty")
        if fields is not None:
            found = _placeholders(text)
            if found != fields:
                raise TemplateError(
                    f"template {name}.txt placeholders {sorted(found)} != expected {sorted(fields)}"
                )
        templates[name] = text
    return templates


def render_template(template_id: str, **fields: str) -> str:
    templates = load_templates()
    if template_id not in templates:
        raise TemplateError(f"unknown template id {template_id!r}")
    if _TEMPLATE_FIELDS[template_id] is None:
        if fields:
            raise TemplateError(f"template {template_id} takes no placeholders")
        return templates[template_id]
    return templates[template_id].format(**fields)


def role_display(role: Role, propbank_prefix: bool) -> str:
    """Role text as it appears in prompts.

    The "PropBank" qualifier applies only to the numbered roles; Instrument
    and Location are ordinary English words and never take it.
    """
    if propbank_prefix and role.is_argn:
        return f"PropBank {role.value}"
    return role.value


def output_instruction(output: OutputForm) -> str:
    """Verbatim reply-format block appended to every scoring prompt."""
    name = "output_numeric" if output == OutputForm.NUMERIC else "output_categorical"
    return render_template(name)


def _check_sentence(cfg: ExperimentConfig, sentence: str | None) -> None:
    if cfg.input == InputForm.GENERATED_SENTENCE and sentence is None:
        raise ValueError(f"config {cfg.experiment_id} requires a context sentence")
    if cfg.input == InputForm.LEMMA_TUPLE and sentence is not None:
        raise ValueError(f"config {cfg.experiment_id} takes no context sentence")


def _scoring_step(
    item: NormItem, cfg: ExperimentConfig, sentence: str | None, step_index: int
) -> ChainStep:
    role = role_display(item.role, cfg.propbank_prefix)
    if sentence is None:
        template_id = "simple_score_lemma"
        question = render_template(
            template_id, predicate=item.predicate, argument=item.argument, role=role
        )
    else:
        template_id = "simple_score_sentence"
        question = render_template(
            template_id,
            predicate=item.predicate,
            argument=item.argument,
            role=role,
            sentence=sentence,
        )
    text = question + "\n" + output_instruction(cfg.output)
    return ChainStep(step_index, template_id, text, Expects.SCORE_JSON)


def render_simple_chain(
    item: NormItem, cfg: ExperimentConfig, sentence: str | None = None
) -> PromptChain:
    """Single scoring step, with or without a generated-sentence context."""
    _check_sentence(cfg, sentence)
    return PromptChain(steps=(_scoring_step(item, cfg, sentence, 0),), context_sentence=sentence)


def render_step_chain(
    item: NormItem, cfg: ExperimentConfig, sentence: str | None = None
) -> PromptChain:
    """Three reasoning prompts followed by the scoring step.

    Step 2 names the item's actual role rather than a fixed one; the
    reasoning would otherwise contradict steps 1 and 3 for every non-matching
    item. For sentence configs, every step embeds the sentence.
    """
    _check_sentence(cfg, sentence)
    role = role_display(item.role, cfg.propbank_prefix)
    suffix = "lemma" if sentence is None else "sentence"
    fields: dict[str, str] = {"predicate": item.predicate, "role": role}
    if sentence is not None:
        fields["sentence"] = sentence
    steps = [
        ChainStep(
            0,
            f"step1_{suffix}",
            render_template(f"step1_{suffix}", **fields),
            Expects.FREE_TEXT,
        )
    ]
    fields["argument"] = item.argument
    for i, name in enumerate((f"step2_{suffix}", f"step3_{suffix}"), start=1):
        steps.append(ChainStep(i, name, render_template(name, **fields), Expects.FREE_TEXT))
    steps.append(_scoring_step(item, cfg, sentence, 3))
    return PromptChain(steps=tuple(steps), context_sentence=sentence)


def render_chain(
    item: NormItem, cfg: ExperimentConfig, sentence: str | None = None
) -> PromptChain:
    """Dispatch to the simple or step-by-step renderer per the config."""
    if cfg.reasoning == ReasoningForm.SIMPLE:
        return render_simple_chain(item, cfg, sentence)
    return render_step_chain(item, cfg, sentence)
