"""Report rendering: machine-readable TSV plus human-readable aligned text.

TSV output carries no timestamps or run ids, so replaying a recorded run
produces byte-identical files; wall-clock detail lives in the manifest.
Figures are rendered next to the delimited files (see :mod:`themfit.figures`).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, TYPE_CHECKING

from .codec import ScoreOutcome
from .norms import Dataset, normalize_rating
from .stats import CorrelationResult, FitJudgment

if TYPE_CHECKING:
    from .runner import AnalyzeResult, GridResult, RunManifest, SweepResult

RUN_REPORT_TSV = "report.tsv"
RUN_REPORT_TXT = "report.txt"
RUN_SCATTER_PNG = "scatter.png"

_RUN_COLUMNS = (
    "experiment",
    "dataset",
    "rho",
    "p_value",
    "n",
    "excluded",
    "backoff",
    "incoherent",
)


def format_rho(rho: float) -> str:
    return f"{rho:.6f}"


def format_p(p: float | None) -> str:
    if p is None:
        return "NA"
    return f"{p:.3g}"


def _result_row(experiment_id: str, dataset_name: str, result: CorrelationResult) -> list[str]:
    return [
        experiment_id,
        dataset_name,
        format_rho(result.rho),
        format_p(result.p_value),
        str(result.n),
        str(result.excluded),
        str(result.backoff_count),
        str(result.incoherent_count),
    ]


def render_run_tsv(experiment_id: str, dataset_name: str, result: CorrelationResult) -> str:
    lines = ["\t".join(_RUN_COLUMNS), "\t".join(_result_row(experiment_id, dataset_name, result))]
    return "\n".join(lines) + "\n"


def _aligned(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for row in rows:
        out.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"


def render_run_text(experiment_id: str, dataset_name: str, result: CorrelationResult) -> str:
    rows = [list(_RUN_COLUMNS), _result_row(experiment_id, dataset_name, result)]
    return _aligned(rows)


def write_run_report(
    run_dir: Path,
    manifest: "RunManifest",
    result: CorrelationResult,
    outcomes: Sequence[ScoreOutcome],
    dataset: Dataset,
) -> None:
    """Write report.tsv, report.txt, and the human-vs-model scatter figure."""
    experiment_id = manifest.experiment.experiment_id
    (run_dir / RUN_REPORT_TSV).write_text(
        render_run_tsv(experiment_id, dataset.name, result), encoding="utf-8"
    )
    (run_dir / RUN_REPORT_TXT).write_text(
        render_run_text(experiment_id, dataset.name, result), encoding="utf-8"
    )
    from . import figures

    ratings = {item.item_id: item for item in dataset.items}
    pairs = [
        (normalize_rating(ratings[o.item_id].human_rating, ratings[o.item_id].scale), o.value)
        for o in outcomes
    ]
    figures.save_run_scatter(
        pairs, result.rho, f"{experiment_id} on {dataset.name}", run_dir / RUN_SCATTER_PNG
    )


def _cell_text(cell: CorrelationResult | str) -> str:
    if isinstance(cell, str):
        return "ERROR"
    return format_rho(cell.rho)


def render_grid_matrix_tsv(grid: "GridResult") -> str:
    lines = ["\t".join(["experiment", *grid.dataset_names])]
    for experiment_id in grid.experiment_ids:
        row = [experiment_id]
        for name in grid.dataset_names:
            row.append(_cell_text(grid.cells[(experiment_id, name)]))
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def render_grid_long_tsv(grid: "GridResult") -> str:
    """Long-form grid report: one row per cell with p, n, and failure counts."""
    lines = ["\t".join([*_RUN_COLUMNS, "error"])]
    for experiment_id in grid.experiment_ids:
        for name in grid.dataset_names:
            cell = grid.cells[(experiment_id, name)]
            if isinstance(cell, str):
                lines.append("\t".join([experiment_id, name, "", "", "", "", "", "", cell]))
            else:
                lines.append("\t".join([*_result_row(experiment_id, name, cell), ""]))
    return "\n".join(lines) + "\n"


def render_grid_text(grid: "GridResult") -> str:
    rows = [["experiment", *grid.dataset_names]]
    for experiment_id in grid.experiment_ids:
        row = [experiment_id]
        for name in grid.dataset_names:
            row.append(_cell_text(grid.cells[(experiment_id, name)]))
        rows.append(row)
    return _aligned(rows)


def write_grid_report(out_dir: str | Path, grid: "GridResult") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in (
        ("grid_rho.tsv", render_grid_matrix_tsv(grid)),
        ("grid_long.tsv", render_grid_long_tsv(grid)),
        ("grid_report.txt", render_grid_text(grid)),
    ):
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    from . import figures

    heatmap = out_dir / "grid_heatmap.png"
    figures.save_grid_heatmap(grid, heatmap)
    written.append(heatmap)
    return written


def _sweep_cell_text(cell: float | str) -> str:
    if isinstance(cell, str):
        return "ERROR"
    return format_rho(cell)


def render_sweep_tsv(sweep: "SweepResult") -> str:
    lines = ["\t".join(["temperature", *(f"{p:g}" for p in sweep.top_ps)])]
    for temperature in sweep.temperatures:
        row = [f"{temperature:g}"]
        for top_p in sweep.top_ps:
            row.append(_sweep_cell_text(sweep.cells[(temperature, top_p)]))
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def render_sweep_text(sweep: "SweepResult") -> str:
    rows = [["temp \\ top_p", *(f"{p:g}" for p in sweep.top_ps)]]
    for temperature in sweep.temperatures:
        row = [f"{temperature:g}"]
        for top_p in sweep.top_ps:
            row.append(_sweep_cell_text(sweep.cells[(temperature, top_p)]))
        rows.append(row)
    return _aligned(rows)


def write_sweep_report(out_dir: str | Path, sweep: "SweepResult") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in (
        ("sweep.tsv", render_sweep_tsv(sweep)),
        ("sweep.txt", render_sweep_text(sweep)),
    ):
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    from . import figures

    heatmap = out_dir / "sweep_heatmap.png"
    figures.save_sweep_heatmap(sweep, heatmap)
    written.append(heatmap)
    return written


_JUDGMENT_COLUMNS = ("item_id", "human_norm", "model_value", "diff", "label", "threshold")


def render_judgments_tsv(judgments: Sequence[FitJudgment]) -> str:
    lines = ["\t".join(_JUDGMENT_COLUMNS)]
    for judgment in judgments:
        lines.append(
            "\t".join(
                [
                    judgment.item_id,
                    f"{judgment.human_norm:.6f}",
                    f"{judgment.model_value:.6f}",
                    f"{judgment.diff:.6f}",
                    judgment.label.value,
                    f"{judgment.threshold:g}",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_analyze_report(out_dir: str | Path, analysis: "AnalyzeResult") -> list[Path]:
    """Write the judgment table, the annotation-ready JSONL, and the diff histogram."""
    import json

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    tsv = out_dir / "judgments.tsv"
    tsv.write_text(render_judgments_tsv(analysis.judgments), encoding="utf-8")
    written.append(tsv)

    jsonl = out_dir / "judgments.jsonl"
    with open(jsonl, "w", encoding="utf-8") as fh:
        for judgment in analysis.judgments:
            fh.write(
                json.dumps(
                    {
                        "item_id": judgment.item_id,
                        "human_norm": judgment.human_norm,
                        "model_value": judgment.model_value,
                        "diff": judgment.diff,
                        "label": judgment.label.value,
                        "threshold": judgment.threshold,
                        "reasoning_texts": list(analysis.reasoning_by_item.get(judgment.item_id, ())),
                        "annotation": "",
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    written.append(jsonl)

    summary = out_dir / "judgments_summary.txt"
    summary.write_text(
        f"run {analysis.run_id}: threshold {analysis.threshold:g} -> "
        f"good:bad = {analysis.good}:{analysis.bad}\n",
        encoding="utf-8",
    )
    written.append(summary)

    from . import figures

    histogram = out_dir / "judgments_hist.png"
    figures.save_diff_histogram(
        [j.diff for j in analysis.judgments], analysis.threshold, histogram
    )
    written.append(histogram)
    return written
