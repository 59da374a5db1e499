"""Rank statistics and the good/bad fit classifier.

Spearman's rho is computed as the Pearson correlation of fractional
(average) ranks; fractional ranks matter because categorical outputs
produce heavy ties and naive dense ranks would distort rho. P-values use
the two-sided t-approximation ``t = rho * sqrt((n-2) / (1-rho^2))`` with
n-2 degrees of freedom; an exact permutation alternative exists for small
samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .codec import ScoreOutcome, ScoreSource
from .norms import Dataset, RatingScale, normalize_rating


class StatsError(ValueError):
    """Invalid input to a statistics operation."""


class DegenerateRanksError(StatsError):
    """A rank vector has zero variance, so rho is undefined."""


@dataclass(frozen=True)
class CorrelationResult:
    """Spearman rho with sample size and run bookkeeping counters."""

    rho: float
    p_value: float | None
    n: int
    excluded: int = 0
    backoff_count: int = 0
    incoherent_count: int = 0

    def __post_init__(self) -> None:
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho {self.rho} outside [-1, 1]")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")


class FitLabel(Enum):
    GOOD = "Good"
    BAD = "Bad"


@dataclass(frozen=True)
class FitJudgment:
    """Good/bad verdict for one item at a given diff threshold."""

    item_id: str
    human_norm: float
    model_value: float
    diff: float
    label: FitLabel
    threshold: float


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """Fractional ranks (1-based); tied values share the mean of their positions."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(xs: np.ndarray, ys: np.ndarray) -> float:
    xd = xs - xs.mean()
    yd = ys - ys.mean()
    vx = float(np.dot(xd, xd))
    vy = float(np.dot(yd, yd))
    if vx == 0.0 or vy == 0.0:
        raise DegenerateRanksError("zero rank variance; rho undefined")
    return float(np.dot(xd, yd) / math.sqrt(vx * vy))


def spearman(xs: Sequence[float], ys: Sequence[float]) -> CorrelationResult:
    """Spearman rank correlation of two paired lists.

    Populates rho and n; the p-value is a separate computation (see
    :func:`p_value` and :func:`exact_p_value`).
    """
    if len(xs) != len(ys):
        raise StatsError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise StatsError(f"need at least 2 pairs, got {n}")
    xa = np.asarray(xs, dtype=float)
    ya = np.asarray(ys, dtype=float)
    if np.isnan(xa).any() or np.isnan(ya).any():
        raise StatsError("NaN values are not allowed")
    rho = _pearson(average_ranks(xa), average_ranks(ya))
    # Guard tiny float overshoot past +/-1 from the dot products.
    rho = max(-1.0, min(1.0, rho))
    return CorrelationResult(rho=rho, p_value=None, n=n)


def p_value(rho: float, n: int) -> float:
    """Two-sided p for an observed rho via the t-approximation."""
    if n < 3:
        raise StatsError(f"p-value needs n >= 3, got {n}")
    if not -1.0 <= rho <= 1.0:
        raise StatsError(f"rho {rho} outside [-1, 1]")
    if abs(rho) == 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * _scipy_stats.t.sf(abs(t), n - 2))


def exact_p_value(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Exact two-sided permutation p-value; only feasible for n < 10.

    Enumerates every permutation of one rank vector and counts those with
    |rho| at least as extreme as observed.
    """
    n = len(xs)
    if n != len(ys):
        raise StatsError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if n >= 10:
        raise StatsError("exact permutation p-value is limited to n < 10")
    observed = spearman(xs, ys).rho
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    xd = rx - rx.mean()
    yd = ry - ry.mean()
    vx = float(np.dot(xd, xd))
    vy = float(np.dot(yd, yd))
    if vx == 0.0 or vy == 0.0:
        raise DegenerateRanksError("zero rank variance; rho undefined")
    norm = math.sqrt(vx * vy)
    threshold = abs(observed) - 1e-12
    hits = 0
    total = 0
    for perm in permutations(range(n)):
        rho = float(np.dot(xd, yd[list(perm)])) / norm
        if abs(rho) >= threshold:
            hits += 1
        total += 1
    return hits / total


_BACKOFF_SOURCES = (ScoreSource.BACKOFF_NUMERIC, ScoreSource.BACKOFF_CATEGORICAL)


def correlate_experiment(
    dataset: Dataset,
    outcomes: Sequence[ScoreOutcome],
    *,
    incoherent_count: int = 0,
    exact_p: bool = False,
) -> CorrelationResult:
    """Correlate scored outcomes against the dataset's human ratings.

    Pairs are joined on item_id and sorted by it before ranking, so the
    result does not depend on completion order. Items without an outcome
    count as excluded; the incoherent-sentence tally is run bookkeeping the
    caller supplies.
    """
    ratings = {item.item_id: item.human_rating for item in dataset.items}
    for outcome in outcomes:
        if outcome.item_id not in ratings:
            raise StatsError(f"outcome for unknown item_id {outcome.item_id!r}")
    paired = sorted(outcomes, key=lambda o: o.item_id)
    if len(paired) < 3:
        raise StatsError(f"need at least 3 scored items, got {len(paired)}")
    xs = [ratings[o.item_id] for o in paired]
    ys = [o.value for o in paired]
    base = spearman(xs, ys)
    if exact_p and base.n < 10:
        p = exact_p_value(xs, ys)
    else:
        p = p_value(base.rho, base.n)
    return CorrelationResult(
        rho=base.rho,
        p_value=p,
        n=base.n,
        excluded=len(dataset.items) - len(paired),
        backoff_count=sum(1 for o in paired if o.source in _BACKOFF_SOURCES),
        incoherent_count=incoherent_count,
    )


def classify_fit(
    human_rating: float,
    scale: RatingScale,
    model_value: float,
    threshold: float,
    item_id: str = "",
) -> FitJudgment:
    """Label an item Good when |normalized human - model| is strictly below the threshold.

    Equality counts as Bad: the boundary is unassigned by the good/bad
    definitions, and strict-less keeps the rule deterministic.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if not 0.0 <= model_value <= 1.0:
        raise ValueError(f"model value {model_value} outside [0, 1]")
    human_norm = normalize_rating(human_rating, scale)
    diff = abs(human_norm - model_value)
    label = FitLabel.GOOD if diff < threshold else FitLabel.BAD
    return FitJudgment(
        item_id=item_id,
        human_norm=human_norm,
        model_value=model_value,
        diff=diff,
        label=label,
        threshold=threshold,
    )
