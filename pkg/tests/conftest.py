from __future__ import annotations

from pathlib import Path

import pytest

from themfit import Dataset, NormItem, RatingScale, Role, load_dataset, preprocess

TESTS_DIR = Path(__file__).parent
FIXTURE_DATA = TESTS_DIR / "data"
GOLDEN_DIR = TESTS_DIR / "golden"
CASSETTES_DIR = TESTS_DIR / "cassettes"
REPO_DATA = TESTS_DIR.parent / "data"

SCALE_17 = RatingScale(1.0, 7.0)


def write_tsv(path: Path, rows: list[tuple[str, str, str, str, str]]) -> Path:
    """Write a canonical-format TSV fixture; rows are (dataset, predicate, argument, role, rating)."""
    lines = ["dataset\tpredicate\targument\trole\trating"]
    lines += ["\t".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def pizza_item() -> NormItem:
    return NormItem(
        item_id="demo:0",
        dataset="demo",
        predicate="eat",
        argument="pizza",
        role=Role.ARG1,
        human_rating=5.5,
        scale=SCALE_17,
    )


@pytest.fixture
def accept5() -> Dataset:
    """Five items whose normalized ratings hit the category points exactly."""
    return preprocess(load_dataset(FIXTURE_DATA / "accept5.tsv"))


@pytest.fixture
def tie5() -> Dataset:
    """Five items whose nearest-category quantization produces a tie."""
    return preprocess(load_dataset(FIXTURE_DATA / "tie5.tsv"))


@pytest.fixture
def demo10() -> Dataset:
    return preprocess(load_dataset(FIXTURE_DATA / "demo10.tsv"))
