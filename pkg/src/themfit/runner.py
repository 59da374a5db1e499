"""End-to-end experiment execution.

A run walks every dataset item through its configured pipeline (context
building for sentence inputs, chain execution, score parsing), records one
transcript line per gateway call, and correlates the collected scores
against the human ratings. Runs are resumable: scored items are skipped on
resume, everything else re-executes, and under record/replay the final
result matches an uninterrupted run.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .codec import (
    ScoreOutcome,
    ScoreParseError,
    ScoreSource,
    average,
    category_value,
    extract_json,
    parse_categorical,
    parse_numeric,
)
from .context import build_context, generation_params
from .gateway import (
    AuthError,
    CacheMissError,
    ChainStepError,
    FinishReason,
    Gateway,
    GatewayError,
    Message,
    ModelResponse,
    TransportError,
    cache_key,
)
from .norms import ColumnSpec, Dataset, NormItem, RatingScale, load_dataset, write_dataset
from .prompts import (
    ExperimentConfig,
    Expects,
    InputForm,
    OutputForm,
    default_max_tokens,
    render_chain,
)
from .stats import CorrelationResult, FitJudgment, StatsError, classify_fit, correlate_experiment

RETRY_REMINDER = "Reply ONLY with the JSON object."

MANIFEST_FILE = "manifest.json"
TRANSCRIPT_FILE = "transcript.jsonl"
OUTCOMES_FILE = "outcomes.jsonl"
ITEMS_FILE = "items.tsv"


class RunAbortedError(RuntimeError):
    """An unrecoverable gateway failure stopped the run; transcripts are kept."""

    def __init__(self, run_id: str, cause: Exception):
        super().__init__(f"run {run_id} aborted: {cause}")
        self.run_id = run_id
        self.cause = cause


class _ItemFailed(Exception):
    """Internal: the item could not be scored and is excluded from rho."""

    def __init__(self, reason: str, incoherent: int = 0):
        super().__init__(reason)
        self.reason = reason
        self.incoherent = incoherent


@dataclass(frozen=True)
class RunTotals:
    items: int
    scored: int
    failed: int
    backoff: int
    incoherent_sentences: int

    def __post_init__(self) -> None:
        if self.scored + self.failed > self.items:
            raise ValueError("scored + failed cannot exceed items")


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    experiment: ExperimentConfig
    dataset_name: str
    scale: RatingScale
    gateway_mode: str
    started_at: str
    finished_at: str | None
    totals: RunTotals
    status: str = "finished"


@dataclass(frozen=True)
class TranscriptRecord:
    """One gateway call: request, response, and what the harness made of it."""

    run_id: str
    item_id: str
    phase: str  # Generate | Verify | Reason | Score
    step_index: int | None
    context_index: int | None
    attempt: int
    request: tuple[Message, ...]
    response_text: str
    finish_reason: str
    parsed: object
    error: str | None
    digest: str

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "item_id": self.item_id,
            "phase": self.phase,
            "step_index": self.step_index,
            "context_index": self.context_index,
            "attempt": self.attempt,
            "request": [{"role": m.role, "text": m.text} for m in self.request],
            "response_text": self.response_text,
            "finish_reason": self.finish_reason,
            "parsed": self.parsed,
            "error": self.error,
            "digest": self.digest,
        }


class _RunLog:
    """JSONL writers for transcripts and per-item outcomes.

    Fresh runs truncate any leftover files from an earlier attempt under the
    same run id; resumed runs append.
    """

    def __init__(self, run_dir: Path | None, append: bool = False):
        self._lock = threading.Lock()
        self.transcript_count = 0
        self._transcript = None
        self._outcomes = None
        if run_dir is not None:
            mode = "a" if append else "w"
            self._transcript = open(run_dir / TRANSCRIPT_FILE, mode, encoding="utf-8")
            self._outcomes = open(run_dir / OUTCOMES_FILE, mode, encoding="utf-8")

    def record(self, record: TranscriptRecord) -> None:
        with self._lock:
            self.transcript_count += 1
            if self._transcript is not None:
                self._transcript.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
                self._transcript.flush()

    def outcome(self, payload: dict) -> None:
        with self._lock:
            if self._outcomes is not None:
                self._outcomes.write(json.dumps(payload, ensure_ascii=False) + "\n")
                self._outcomes.flush()

    def close(self) -> None:
        for fh in (self._transcript, self._outcomes):
            if fh is not None:
                fh.close()


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def new_run_id(cfg: ExperimentConfig, dataset: Dataset) -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    return f"{cfg.experiment_id.replace('.', '-')}_{dataset.name}_{stamp}"


def _is_fatal(exc: Exception) -> bool:
    """Transport exhaustion, auth rejection, and replay misses end the run."""
    if isinstance(exc, (TransportError, AuthError, CacheMissError)):
        return True
    if isinstance(exc, ChainStepError):
        return _is_fatal(exc.__cause__) if isinstance(exc.__cause__, Exception) else False
    return False


def _parse_score(text: str, finish: FinishReason, output: OutputForm) -> float:
    if finish == FinishReason.LENGTH:
        raise ScoreParseError("response truncated (finish_reason=length)")
    obj = extract_json(text)
    if output == OutputForm.NUMERIC:
        return parse_numeric(obj)
    return category_value(parse_categorical(obj))


class _ItemScorer:
    """Runs the configured pipeline for single items and writes transcripts."""

    def __init__(self, run_id: str, cfg: ExperimentConfig, gateway: Gateway, log: _RunLog):
        self.run_id = run_id
        self.cfg = cfg
        self.gateway = gateway
        self.log = log
        scoring_default = default_max_tokens(cfg.reasoning, cfg.input)
        self._override = (
            cfg.model_params.max_tokens
            if cfg.model_params.max_tokens != scoring_default
            else None
        )
        self._backoff_cfg: ExperimentConfig | None = None
        if cfg.input == InputForm.GENERATED_SENTENCE:
            # Backoff runs the lemma-tuple twin of this cell (2.x -> 1.x, 4.x -> 3.x).
            twin_id = {"2": "1", "4": "3"}[cfg.experiment_id[0]] + cfg.experiment_id[1:]
            tokens = self._override or default_max_tokens(cfg.reasoning, InputForm.LEMMA_TUPLE)
            self._backoff_cfg = ExperimentConfig.from_id(
                twin_id,
                model_name=cfg.model_params.model_name,
                propbank_prefix=cfg.propbank_prefix,
                temperature=cfg.model_params.temperature,
                top_p=cfg.model_params.top_p,
                max_tokens=tokens,
            )

    def _record(
        self,
        item_id: str,
        phase: str,
        request: Sequence[Message],
        response: ModelResponse,
        params,
        *,
        step_index: int | None = None,
        context_index: int | None = None,
        attempt: int = 1,
        parsed: object = None,
        error: str | None = None,
    ) -> None:
        self.log.record(
            TranscriptRecord(
                run_id=self.run_id,
                item_id=item_id,
                phase=phase,
                step_index=step_index,
                context_index=context_index,
                attempt=attempt,
                request=tuple(request),
                response_text=response.text,
                finish_reason=response.finish_reason.value,
                parsed=parsed,
                error=error,
                digest=cache_key(params, request),
            )
        )

    def _run_scored_chain(
        self,
        item: NormItem,
        cfg: ExperimentConfig,
        sentence: str | None,
        params,
        context_index: int | None = None,
    ) -> tuple[float, str, list[str]]:
        """Execute one chain and parse its scoring step, with a single retry.

        Returns (score value, raw scoring text, reasoning step texts). Raises
        ScoreParseError when the retry fails too; truncated scoring replies
        count as parse failures rather than being scored silently.
        """
        chain = render_chain(item, cfg, sentence)
        final_request: list[Message] = []

        def on_step(i: int, request: list[Message], response: ModelResponse) -> None:
            if chain.steps[i].expects == Expects.SCORE_JSON:
                final_request[:] = request
            else:
                self._record(
                    item.item_id,
                    "Reason",
                    request,
                    response,
                    params,
                    step_index=i,
                    context_index=context_index,
                )

        responses = self.gateway.run_chain(chain, params, on_step=on_step)
        scoring_index = len(chain.steps) - 1
        scoring_response = responses[-1]
        reasoning = [r.text for r in responses[:-1]]

        try:
            value = _parse_score(scoring_response.text, scoring_response.finish_reason, cfg.output)
            parse_error = None
        except ScoreParseError as exc:
            value = None
            parse_error = str(exc)
        self._record(
            item.item_id,
            "Score",
            final_request,
            scoring_response,
            params,
            step_index=scoring_index,
            context_index=context_index,
            parsed=value,
            error=parse_error,
        )
        if value is not None:
            return value, scoring_response.text, reasoning

        # One retry with an explicit format reminder appended to the prompt.
        retry_text = chain.scoring_step.rendered_text + "\n" + RETRY_REMINDER
        retry_request = list(final_request[:-1]) + [Message("user", retry_text)]
        retry_response = self.gateway.complete(retry_request, params)
        try:
            value = _parse_score(retry_response.text, retry_response.finish_reason, cfg.output)
            parse_error = None
        except ScoreParseError as exc:
            value = None
            parse_error = str(exc)
        self._record(
            item.item_id,
            "Score",
            retry_request,
            retry_response,
            params,
            step_index=scoring_index,
            context_index=context_index,
            attempt=2,
            parsed=value,
            error=parse_error,
        )
        if value is None:
            raise ScoreParseError(f"scoring failed after retry: {parse_error}")
        return value, retry_response.text, reasoning

    def score_item(self, item: NormItem) -> tuple[ScoreOutcome, int]:
        """Score one item; returns (outcome, incoherent sentence count)."""
        try:
            if self.cfg.input == InputForm.LEMMA_TUPLE:
                value, raw, reasoning = self._run_scored_chain(item, self.cfg, None, self.cfg.model_params)
                source = (
                    ScoreSource.NUMERIC_DIRECT
                    if self.cfg.output == OutputForm.NUMERIC
                    else ScoreSource.CATEGORICAL_MAPPED
                )
                return (
                    ScoreOutcome(
                        item_id=item.item_id,
                        value=value,
                        source=source,
                        raw_text=raw,
                        reasoning_texts=tuple(reasoning) or None,
                    ),
                    0,
                )
            return self._score_with_context(item)
        except ScoreParseError as exc:
            raise _ItemFailed(str(exc)) from exc
        except GatewayError as exc:
            if _is_fatal(exc):
                raise
            raise _ItemFailed(str(exc)) from exc

    def _score_with_context(self, item: NormItem) -> tuple[ScoreOutcome, int]:
        def recorder(phase, request, response, parsed, candidate_index):
            self._record(
                item.item_id,
                phase,
                request,
                response,
                gen_params,
                context_index=candidate_index,
                parsed=parsed,
            )

        gen_params = generation_params(self.cfg.model_params)
        ctx = build_context(item, self.gateway, gen_params, recorder)
        incoherent = ctx.incoherent_count

        if ctx.backoff:
            assert self._backoff_cfg is not None
            value, raw, reasoning = self._run_scored_chain(
                item, self._backoff_cfg, None, self._backoff_cfg.model_params
            )
            source = (
                ScoreSource.BACKOFF_NUMERIC
                if self.cfg.output == OutputForm.NUMERIC
                else ScoreSource.BACKOFF_CATEGORICAL
            )
            outcome = ScoreOutcome(
                item_id=item.item_id,
                value=value,
                source=source,
                raw_text=raw,
                reasoning_texts=tuple(reasoning) or None,
            )
            return outcome, incoherent

        components: list[float] = []
        raws: list[str] = []
        reasoning_all: list[str] = []
        errors: list[str] = []
        for index, sentence in enumerate(ctx.usable):
            try:
                value, raw, reasoning = self._run_scored_chain(
                    item, self.cfg, sentence, self.cfg.model_params, context_index=index
                )
            except ScoreParseError as exc:
                errors.append(f"sentence {index}: {exc}")
                continue
            components.append(value)
            raws.append(raw)
            reasoning_all.extend(reasoning)
        if not components:
            raise _ItemFailed(
                f"all {len(ctx.usable)} sentence scores failed ({'; '.join(errors)})",
                incoherent=incoherent,
            )
        outcome = ScoreOutcome(
            item_id=item.item_id,
            value=average(components),
            source=ScoreSource.SENTENCE_AVERAGED,
            raw_text="\n".join(raws),
            components=tuple(components),
            reasoning_texts=tuple(reasoning_all) or None,
        )
        return outcome, incoherent


def load_outcome_records(run_dir: Path) -> tuple[dict[str, ScoreOutcome], dict[str, int]]:
    """Outcomes recorded by an earlier attempt; failures are retried."""
    done: dict[str, ScoreOutcome] = {}
    incoherent: dict[str, int] = {}
    path = run_dir / OUTCOMES_FILE
    if not path.exists():
        return done, incoherent
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: corrupt outcome record at line {line_no}: {exc}") from exc
        if payload.get("kind") == "scored":
            outcome = ScoreOutcome.from_json(payload["outcome"])
            done[outcome.item_id] = outcome
            incoherent[outcome.item_id] = payload.get("incoherent", 0)
    return done, incoherent


def manifest_to_json(manifest: RunManifest) -> dict:
    cfg = manifest.experiment
    return {
        "run_id": manifest.run_id,
        "experiment": {
            "experiment_id": cfg.experiment_id,
            "propbank_prefix": cfg.propbank_prefix,
            "model_params": {
                "model_name": cfg.model_params.model_name,
                "temperature": cfg.model_params.temperature,
                "top_p": cfg.model_params.top_p,
                "max_tokens": cfg.model_params.max_tokens,
            },
        },
        "dataset_name": manifest.dataset_name,
        "scale": {"min": manifest.scale.min, "max": manifest.scale.max},
        "gateway_mode": manifest.gateway_mode,
        "started_at": manifest.started_at,
        "finished_at": manifest.finished_at,
        "totals": {
            "items": manifest.totals.items,
            "scored": manifest.totals.scored,
            "failed": manifest.totals.failed,
            "backoff": manifest.totals.backoff,
            "incoherent_sentences": manifest.totals.incoherent_sentences,
        },
        "status": manifest.status,
    }


def manifest_from_json(payload: dict) -> RunManifest:
    exp = payload["experiment"]
    params = exp["model_params"]
    cfg = ExperimentConfig.from_id(
        exp["experiment_id"],
        model_name=params["model_name"],
        propbank_prefix=exp["propbank_prefix"],
        temperature=params["temperature"],
        top_p=params["top_p"],
        max_tokens=params["max_tokens"],
    )
    totals = payload["totals"]
    return RunManifest(
        run_id=payload["run_id"],
        experiment=cfg,
        dataset_name=payload["dataset_name"],
        scale=RatingScale(payload["scale"]["min"], payload["scale"]["max"]),
        gateway_mode=payload["gateway_mode"],
        started_at=payload["started_at"],
        finished_at=payload.get("finished_at"),
        totals=RunTotals(
            items=totals["items"],
            scored=totals["scored"],
            failed=totals["failed"],
            backoff=totals["backoff"],
            incoherent_sentences=totals["incoherent_sentences"],
        ),
        status=payload.get("status", "finished"),
    )


def _write_manifest(run_dir: Path, manifest: RunManifest) -> None:
    (run_dir / MANIFEST_FILE).write_text(
        json.dumps(manifest_to_json(manifest), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_run_inputs(run_dir: str | Path) -> tuple[RunManifest, Dataset]:
    """Reconstruct the config and dataset snapshot stored with a run."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / MANIFEST_FILE
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest at {manifest_path}")
    manifest = manifest_from_json(json.loads(manifest_path.read_text(encoding="utf-8")))
    spec = ColumnSpec(item_id="item_id", scale=manifest.scale)
    dataset = load_dataset(run_dir / ITEMS_FILE, spec=spec, name=manifest.dataset_name)
    return manifest, dataset


def run_experiment(
    cfg: ExperimentConfig,
    dataset: Dataset,
    gateway: Gateway,
    out_dir: str | Path | None = None,
    run_id: str | None = None,
    resume: bool = False,
    exact_p: bool = False,
) -> tuple[CorrelationResult, RunManifest]:
    """Run one experiment cell over a preprocessed dataset.

    With ``out_dir`` set, the run directory ``<out_dir>/<run_id>/`` receives
    the dataset snapshot, transcript, per-item outcomes, manifest, and the
    report files. ``resume=True`` reloads previously scored items from that
    directory and only executes the rest.
    """
    if len(dataset.items) < 3:
        raise StatsError(f"dataset too small: {len(dataset.items)} items (need >= 3)")
    if resume and out_dir is None:
        raise ValueError("resume requires an output directory")
    run_id = run_id or new_run_id(cfg, dataset)
    started_at = _utc_now()

    run_dir: Path | None = None
    done: dict[str, ScoreOutcome] = {}
    incoherent_by_item: dict[str, int] = {}
    if out_dir is not None:
        run_dir = Path(out_dir) / run_id
        if resume:
            if not (run_dir / MANIFEST_FILE).exists():
                raise FileNotFoundError(f"cannot resume: no manifest under {run_dir}")
            previous = manifest_from_json(
                json.loads((run_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
            )
            if previous.experiment.experiment_id != cfg.experiment_id:
                raise ValueError(
                    f"resume mismatch: run {run_id} was experiment "
                    f"{previous.experiment.experiment_id}, not {cfg.experiment_id}"
                )
            if previous.dataset_name != dataset.name:
                raise ValueError(
                    f"resume mismatch: run {run_id} was dataset "
                    f"{previous.dataset_name!r}, not {dataset.name!r}"
                )
            done, incoherent_by_item = load_outcome_records(run_dir)
        else:
            run_dir.mkdir(parents=True, exist_ok=True)
            write_dataset(dataset, run_dir / ITEMS_FILE, include_ids=True)

    pending = [item for item in dataset.items if item.item_id not in done]
    log = _RunLog(run_dir, append=resume)
    scorer = _ItemScorer(run_id, cfg, gateway, log)
    failures: dict[str, str] = {}

    def write_running_manifest(status: str, finished: str | None) -> RunManifest:
        totals = RunTotals(
            items=len(dataset.items),
            scored=len(done),
            failed=len(failures),
            backoff=sum(
                1
                for o in done.values()
                if o.source in (ScoreSource.BACKOFF_NUMERIC, ScoreSource.BACKOFF_CATEGORICAL)
            ),
            incoherent_sentences=sum(incoherent_by_item.values()),
        )
        manifest = RunManifest(
            run_id=run_id,
            experiment=cfg,
            dataset_name=dataset.name,
            scale=dataset.scale,
            gateway_mode=gateway.mode,
            started_at=started_at,
            finished_at=finished,
            totals=totals,
            status=status,
        )
        if run_dir is not None:
            _write_manifest(run_dir, manifest)
        return manifest

    write_running_manifest("running", None)

    def execute(item: NormItem) -> tuple[str, ScoreOutcome, int]:
        outcome, incoherent = scorer.score_item(item)
        return item.item_id, outcome, incoherent

    fatal: Exception | None = None
    try:
        if pending:
            max_workers = min(gateway.max_in_flight, len(pending))
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                futures = {pool.submit(execute, item): item for item in pending}
                for future in as_completed(futures):
                    item = futures[future]
                    try:
                        item_id, outcome, incoherent = future.result()
                    except _ItemFailed as exc:
                        failures[item.item_id] = exc.reason
                        incoherent_by_item[item.item_id] = exc.incoherent
                        log.outcome(
                            {
                                "kind": "failed",
                                "item_id": item.item_id,
                                "error": exc.reason,
                                "incoherent": exc.incoherent,
                            }
                        )
                        continue
                    except Exception as exc:  # unrecoverable: stop dispatching
                        fatal = exc
                        for pending_future in futures:
                            pending_future.cancel()
                        break
                    done[item_id] = outcome
                    incoherent_by_item[item_id] = incoherent
                    log.outcome(
                        {"kind": "scored", "incoherent": incoherent, "outcome": outcome.to_json()}
                    )
    finally:
        log.close()
    if fatal is not None:
        write_running_manifest("aborted", _utc_now())
        raise RunAbortedError(run_id, fatal) from fatal

    outcomes = sorted(done.values(), key=lambda o: o.item_id)
    result = correlate_experiment(
        dataset,
        outcomes,
        incoherent_count=sum(incoherent_by_item.values()),
        exact_p=exact_p,
    )
    manifest = write_running_manifest("finished", _utc_now())
    if run_dir is not None:
        from . import report  # local import: report pulls in matplotlib

        report.write_run_report(run_dir, manifest, result, outcomes, dataset)
    return result, manifest


@dataclass(frozen=True)
class GridResult:
    """Rho per (experiment, dataset) cell; failures recorded in-cell."""

    experiment_ids: tuple[str, ...]
    dataset_names: tuple[str, ...]
    cells: dict[tuple[str, str], CorrelationResult | str]


def run_grid(
    experiments: Sequence[ExperimentConfig],
    datasets: Sequence[Dataset],
    gateway: Gateway,
    out_dir: str | Path | None = None,
    exact_p: bool = False,
) -> GridResult:
    """Run every (experiment, dataset) pair; cell failures don't stop the rest."""
    if not experiments or not datasets:
        raise ValueError("grid needs at least one experiment and one dataset")
    cells: dict[tuple[str, str], CorrelationResult | str] = {}
    for cfg in experiments:
        for dataset in datasets:
            key = (cfg.experiment_id, dataset.name)
            run_id = f"{cfg.experiment_id.replace('.', '-')}_{dataset.name}"
            try:
                result, _ = run_experiment(
                    cfg, dataset, gateway, out_dir=out_dir, run_id=run_id, exact_p=exact_p
                )
                cells[key] = result
            except (RunAbortedError, GatewayError, StatsError, ValueError) as exc:
                cells[key] = f"ERROR: {exc}"
    return GridResult(
        experiment_ids=tuple(cfg.experiment_id for cfg in experiments),
        dataset_names=tuple(d.name for d in datasets),
        cells=cells,
    )


@dataclass(frozen=True)
class SweepResult:
    """Rho per (temperature, top_p) cell over a calibration sample."""

    temperatures: tuple[float, ...]
    top_ps: tuple[float, ...]
    cells: dict[tuple[float, float], float | str]


def sweep_grid(
    sample: Dataset,
    temperatures: Sequence[float],
    top_ps: Sequence[float],
    cfg: ExperimentConfig,
    gateway: Gateway,
) -> SweepResult:
    """Run the configured experiment once per (temperature, top_p) cell."""
    if not sample.items:
        raise ValueError("sweep sample is empty")
    if not temperatures or not top_ps:
        raise ValueError("sweep grid is empty")
    cells: dict[tuple[float, float], float | str] = {}
    for temperature in temperatures:
        for top_p in top_ps:
            cell_cfg = replace(
                cfg,
                model_params=replace(cfg.model_params, temperature=temperature, top_p=top_p),
            )
            try:
                result, _ = run_experiment(cell_cfg, sample, gateway)
                cells[(temperature, top_p)] = result.rho
            except (RunAbortedError, GatewayError, StatsError, ValueError) as exc:
                cells[(temperature, top_p)] = f"ERROR: {exc}"
    return SweepResult(
        temperatures=tuple(temperatures), top_ps=tuple(top_ps), cells=cells
    )


@dataclass(frozen=True)
class AnalyzeResult:
    """Per-item judgments plus the good:bad tally for one finished run."""

    run_id: str
    threshold: float
    judgments: tuple[FitJudgment, ...]
    good: int
    bad: int
    reasoning_by_item: dict[str, tuple[str, ...]]


def analyze_run(run_dir: str | Path, threshold: float) -> AnalyzeResult:
    """Classify every scored item of a finished run as Good or Bad.

    Reasoning texts ride along for manual labeling; the annotation slot in
    the emitted records stays empty until a reviewer fills it.
    """
    run_dir = Path(run_dir)
    manifest, dataset = load_run_inputs(run_dir)
    done, _ = load_outcome_records(run_dir)
    items = {item.item_id: item for item in dataset.items}
    judgments = []
    reasoning: dict[str, tuple[str, ...]] = {}
    for item_id in sorted(done):
        outcome = done[item_id]
        item = items[item_id]
        judgments.append(
            classify_fit(
                item.human_rating, item.scale, outcome.value, threshold, item_id=item_id
            )
        )
        reasoning[item_id] = outcome.reasoning_texts or ()
    good = sum(1 for j in judgments if j.label.value == "Good")
    return AnalyzeResult(
        run_id=manifest.run_id,
        threshold=threshold,
        judgments=tuple(judgments),
        good=good,
        bad=len(judgments) - good,
        reasoning_by_item=reasoning,
    )
