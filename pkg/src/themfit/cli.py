"""Command-line entry points for the thematic-fit harness."""

from __future__ import annotations

import os
import random
import sys
from pathlib import Path

import click

from . import report as report_mod
from .gateway import API_KEY_ENV_VARS, Gateway, HttpBackend
from .mocking import NormEchoBackend
from .norms import ColumnSpec, Dataset, RatingScale, dedupe, load_dataset, preprocess, strip_indefinite_articles
from .prompts import EXPERIMENT_IDS, ExperimentConfig, load_templates
from .runner import (
    OUTCOMES_FILE,
    RunAbortedError,
    load_outcome_records,
    analyze_run,
    load_run_inputs,
    run_experiment,
    run_grid,
    sweep_grid,
)
from .stats import correlate_experiment


def _api_key() -> str | None:
    for name in API_KEY_ENV_VARS:
        value = os.environ.get(name)
        if value:
            return value
    return None


def _build_gateway(
    mode: str,
    datasets: list[Dataset],
    model: str,
    base_url: str | None,
    concurrency: int,
    cassette_dir: str | None,
) -> Gateway:
    if mode == "mock":
        backend = NormEchoBackend(datasets)
        return Gateway(mode="mock", backend=backend, max_in_flight=concurrency)
    if mode == "replay":
        if not cassette_dir:
            raise click.UsageError("--cassette-dir is required in replay mode")
        return Gateway(mode="replay", cassette_dir=cassette_dir, max_in_flight=concurrency)
    if not base_url:
        raise click.UsageError(f"--base-url is required in {mode} mode")
    backend = HttpBackend(base_url, api_key=_api_key())
    if mode == "record":
        if not cassette_dir:
            raise click.UsageError("--cassette-dir is required in record mode")
        return Gateway(
            mode="record", backend=backend, cassette_dir=cassette_dir, max_in_flight=concurrency
        )
    return Gateway(mode="live", backend=backend, max_in_flight=concurrency)


def _resolve_prefix(propbank_prefix: str, dataset: Dataset) -> bool:
    if propbank_prefix == "on":
        return True
    if propbank_prefix == "off":
        return False
    return dataset.uses_argn_roles()


def _load(dataset_path: str, scale_min: float, scale_max: float) -> Dataset:
    spec = ColumnSpec(scale=RatingScale(scale_min, scale_max))
    return preprocess(load_dataset(dataset_path, spec=spec))


def _gateway_options(fn):
    fn = click.option(
        "--mode",
        type=click.Choice(["live", "record", "replay", "mock"]),
        default="mock",
        show_default=True,
        help="Backend mode; record/replay need a cassette directory.",
    )(fn)
    fn = click.option("--model", default="mock", show_default=True, help="Model name sent to the backend.")(fn)
    fn = click.option("--base-url", default=None, help="Chat-completion endpoint base URL.")(fn)
    fn = click.option("--concurrency", "-k", default=4, show_default=True, help="Max in-flight requests.")(fn)
    fn = click.option("--cassette-dir", default=None, help="Cassette directory for record/replay.")(fn)
    return fn


def _scale_options(fn):
    fn = click.option("--scale-min", default=1.0, show_default=True, help="Human rating scale minimum.")(fn)
    fn = click.option("--scale-max", default=7.0, show_default=True, help="Human rating scale maximum.")(fn)
    return fn


@click.group()
def main() -> None:
    """Thematic-fit prompting harness."""
    load_templates()


@main.command("validate-data")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@_scale_options
def validate_data(dataset_path: str, scale_min: float, scale_max: float) -> None:
    """Load a norms file, apply preprocessing, and report the counts."""
    spec = ColumnSpec(scale=RatingScale(scale_min, scale_max))
    raw = load_dataset(dataset_path, spec=spec)
    deduped = dedupe(raw)
    stripped = strip_indefinite_articles(deduped)
    roles = sorted({item.role.value for item in stripped.items})
    click.echo(f"dataset: {stripped.name}")
    click.echo(f"loaded: {len(raw)} items")
    for entry in stripped.provenance.transforms:
        click.echo(f"  {entry}")
    click.echo(f"roles: {', '.join(roles)}")
    click.echo(f"items after preprocessing: {len(stripped)}")


@main.command("run")
@click.option("--experiment", default="1.1", show_default=True, help="Grid cell id, e.g. 3.2.")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Directory for run artifacts.")
@click.option("--run-id", default=None, help="Explicit run id (default: derived from time).")
@click.option("--resume", is_flag=True, help="Resume the run named by --run-id from --out.")
@click.option("--temperature", default=0.0, show_default=True)
@click.option("--top-p", default=0.95, show_default=True)
@click.option("--max-tokens-override", type=int, default=None, help="Override the per-regime token budget.")
@click.option(
    "--propbank-prefix",
    type=click.Choice(["on", "off", "auto"]),
    default="auto",
    show_default=True,
    help="Qualify numbered roles with 'PropBank' in prompts.",
)
@click.option("--exact-p", is_flag=True, help="Exact permutation p-value (n < 10 only).")
@_scale_options
@_gateway_options
def run(
    experiment: str,
    dataset_path: str | None,
    out_dir: str | None,
    run_id: str | None,
    resume: bool,
    temperature: float,
    top_p: float,
    max_tokens_override: int | None,
    propbank_prefix: str,
    exact_p: bool,
    scale_min: float,
    scale_max: float,
    mode: str,
    model: str,
    base_url: str | None,
    concurrency: int,
    cassette_dir: str | None,
) -> None:
    """Run one experiment over one dataset and write its report."""
    if resume:
        if not run_id or not out_dir:
            raise click.UsageError("--resume requires --run-id and --out")
        manifest, dataset = load_run_inputs(Path(out_dir) / run_id)
        cfg = manifest.experiment
    else:
        if not dataset_path:
            raise click.UsageError("--dataset is required unless resuming")
        dataset = _load(dataset_path, scale_min, scale_max)
        cfg = ExperimentConfig.from_id(
            experiment,
            model_name=model,
            propbank_prefix=_resolve_prefix(propbank_prefix, dataset),
            temperature=temperature,
            top_p=top_p,
            max_tokens=max_tokens_override,
        )
    gateway = _build_gateway(mode, [dataset], model, base_url, concurrency, cassette_dir)
    try:
        result, manifest = run_experiment(
            cfg, dataset, gateway, out_dir=out_dir, run_id=run_id, resume=resume, exact_p=exact_p
        )
    except RunAbortedError as exc:
        click.echo(f"aborted: {exc}", err=True)
        click.echo("transcripts are preserved; re-run with --resume to continue.", err=True)
        sys.exit(1)
    click.echo(report_mod.render_run_text(cfg.experiment_id, dataset.name, result), nl=False)
    totals = manifest.totals
    click.echo(
        f"items={totals.items} scored={totals.scored} failed={totals.failed} "
        f"backoff={totals.backoff} incoherent_sentences={totals.incoherent_sentences}"
    )
    if out_dir:
        click.echo(f"run dir: {Path(out_dir) / manifest.run_id}")


@main.command("grid")
@click.option(
    "--experiment",
    "experiments",
    multiple=True,
    help="Grid cell ids; defaults to all eight.",
)
@click.option(
    "--dataset",
    "dataset_paths",
    multiple=True,
    required=True,
    type=click.Path(exists=True),
)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--temperature", default=0.0, show_default=True)
@click.option("--top-p", default=0.95, show_default=True)
@click.option(
    "--propbank-prefix",
    type=click.Choice(["on", "off", "auto"]),
    default="auto",
    show_default=True,
)
@_scale_options
@_gateway_options
def grid(
    experiments: tuple[str, ...],
    dataset_paths: tuple[str, ...],
    out_dir: str,
    temperature: float,
    top_p: float,
    propbank_prefix: str,
    scale_min: float,
    scale_max: float,
    mode: str,
    model: str,
    base_url: str | None,
    concurrency: int,
    cassette_dir: str | None,
) -> None:
    """Run the experiment grid (experiments x datasets) and write the report table."""
    experiment_ids = list(experiments) or list(EXPERIMENT_IDS)
    datasets = [_load(path, scale_min, scale_max) for path in dataset_paths]
    shared_gateway = None
    if mode != "mock":
        shared_gateway = _build_gateway(mode, datasets, model, base_url, concurrency, cassette_dir)
    results = []
    for dataset in datasets:
        # Mock mode gets a per-dataset echo backend: overlapping tuples with
        # different ratings across datasets would otherwise distort the self-test.
        gateway = shared_gateway or _build_gateway(
            mode, [dataset], model, base_url, concurrency, cassette_dir
        )
        prefix = _resolve_prefix(propbank_prefix, dataset)
        configs = [
            ExperimentConfig.from_id(
                experiment_id,
                model_name=model,
                propbank_prefix=prefix,
                temperature=temperature,
                top_p=top_p,
            )
            for experiment_id in experiment_ids
        ]
        results.append(run_grid(configs, [dataset], gateway, out_dir=out_dir))
    # Merge the per-dataset grids into one table.
    from .runner import GridResult

    cells = {}
    for partial in results:
        cells.update(partial.cells)
    merged = GridResult(
        experiment_ids=tuple(experiment_ids),
        dataset_names=tuple(d.name for d in datasets),
        cells=cells,
    )
    written = report_mod.write_grid_report(out_dir, merged)
    click.echo(report_mod.render_grid_text(merged), nl=False)
    for path in written:
        click.echo(f"wrote {path}")


@main.command("sweep")
@click.option("--experiment", default="1.1", show_default=True)
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--temps", default="0,0.5,0.9", show_default=True, help="Comma-separated temperatures.")
@click.option("--top-ps", default="0.5,0.7,0.95", show_default=True, help="Comma-separated top_p values.")
@click.option("--sample-size", default=20, show_default=True, help="Calibration sample size.")
@click.option("--sample-seed", default=0, show_default=True)
@click.option(
    "--propbank-prefix",
    type=click.Choice(["on", "off", "auto"]),
    default="auto",
    show_default=True,
)
@_scale_options
@_gateway_options
def sweep(
    experiment: str,
    dataset_path: str,
    out_dir: str,
    temps: str,
    top_ps: str,
    sample_size: int,
    sample_seed: int,
    propbank_prefix: str,
    scale_min: float,
    scale_max: float,
    mode: str,
    model: str,
    base_url: str | None,
    concurrency: int,
    cassette_dir: str | None,
) -> None:
    """Sweep temperature and top_p over a small sample; emit the rho table."""
    dataset = _load(dataset_path, scale_min, scale_max)
    if sample_size < len(dataset.items):
        rng = random.Random(sample_seed)
        items = tuple(sorted(rng.sample(dataset.items, sample_size), key=lambda i: i.item_id))
        dataset = Dataset(
            name=dataset.name,
            items=items,
            provenance=dataset.provenance.appended(
                f"sample: {sample_size} items (seed {sample_seed})"
            ),
        )
    temperatures = [float(t) for t in temps.split(",") if t]
    top_p_values = [float(p) for p in top_ps.split(",") if p]
    cfg = ExperimentConfig.from_id(
        experiment,
        model_name=model,
        propbank_prefix=_resolve_prefix(propbank_prefix, dataset),
    )
    gateway = _build_gateway(mode, [dataset], model, base_url, concurrency, cassette_dir)
    result = sweep_grid(dataset, temperatures, top_p_values, cfg, gateway)
    written = report_mod.write_sweep_report(out_dir, result)
    click.echo(report_mod.render_sweep_text(result), nl=False)
    for path in written:
        click.echo(f"wrote {path}")


@main.command("analyze")
@click.option("--out", "out_dir", type=click.Path(exists=True), required=True)
@click.option("--run-id", required=True)
@click.option("--threshold", default=0.25, show_default=True, help="Good/bad diff threshold.")
def analyze(out_dir: str, run_id: str, threshold: float) -> None:
    """Classify a finished run's items as Good/Bad at the given threshold."""
    run_dir = Path(out_dir) / run_id
    if not run_dir.exists():
        raise click.UsageError(f"unknown run id {run_id!r} under {out_dir}")
    analysis = analyze_run(run_dir, threshold)
    written = report_mod.write_analyze_report(run_dir, analysis)
    click.echo(f"threshold {threshold:g}: good:bad = {analysis.good}:{analysis.bad}")
    for path in written:
        click.echo(f"wrote {path}")


@main.command("report")
@click.option("--out", "out_dir", type=click.Path(exists=True), required=True)
@click.option("--run-id", required=True)
def report(out_dir: str, run_id: str) -> None:
    """Regenerate a run's report files from its stored outcomes."""
    run_dir = Path(out_dir) / run_id
    if not (run_dir / OUTCOMES_FILE).exists():
        raise click.UsageError(f"no outcomes recorded under {run_dir}")
    manifest, dataset = load_run_inputs(run_dir)
    done, incoherent_by_item = load_outcome_records(run_dir)
    outcomes = sorted(done.values(), key=lambda o: o.item_id)
    result = correlate_experiment(
        dataset, outcomes, incoherent_count=sum(incoherent_by_item.values())
    )
    report_mod.write_run_report(run_dir, manifest, result, outcomes, dataset)
    click.echo(report_mod.render_run_text(manifest.experiment.experiment_id, dataset.name, result), nl=False)
    click.echo(f"wrote {run_dir / report_mod.RUN_REPORT_TSV}")
    click.echo(f"wrote {run_dir / report_mod.RUN_REPORT_TXT}")
    click.echo(f"wrote {run_dir / report_mod.RUN_SCATTER_PNG}")


if __name__ == "__main__":
    main()
