"""Loading and preprocessing of thematic-fit norm datasets.

A norm file pairs a predicate lemma, an argument head lemma, and a semantic
role with an averaged human typicality rating. The canonical interchange
format is a UTF-8 TSV with the header
``dataset<TAB>predicate<TAB>argument<TAB>role<TAB>rating``; a column mapping
adapts other layouts. Preprocessing steps are explicit and append to the
dataset's provenance log, so every applied transform is auditable.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

logger = logging.getLogger(__name__)


class DataFormatError(ValueError):
    """Malformed norm file; messages name the offending line where known."""


class Role(Enum):
    """Semantic role of an argument. Exactly these five are representable."""

    ARG0 = "Arg0"
    ARG1 = "Arg1"
    ARG2 = "Arg2"
    INSTRUMENT = "Instrument"
    LOCATION = "Location"

    @classmethod
    def parse(cls, text: str) -> "Role":
        """Parse an exact role spelling; any other string is an error."""
        for role in cls:
            if role.value == text:
                return role
        expected = "|".join(r.value for r in cls)
        raise ValueError(f"unknown role string {text!r} (expected {expected})")

    @property
    def is_argn(self) -> bool:
        """True for the PropBank-style numbered roles."""
        return self in (Role.ARG0, Role.ARG1, Role.ARG2)


@dataclass(frozen=True)
class RatingScale:
    """Closed rating interval, e.g. the 1-7 scale used by the human raters."""

    min: float
    max: float

    def __post_init__(self) -> None:
        if not self.min < self.max:
            raise ValueError(f"rating scale requires min < max, got [{self.min}, {self.max}]")


@dataclass(frozen=True)
class NormItem:
    """One ``(predicate, argument, role)`` tuple with its averaged human rating."""

    item_id: str
    dataset: str
    predicate: str
    argument: str
    role: Role
    human_rating: float
    scale: RatingScale

    def __post_init__(self) -> None:
        for name in ("predicate", "argument"):
            value = getattr(self, name)
            if not value:
                raise ValueError(f"{name} must be nonempty")
            if value != value.strip():
                raise ValueError(f"{name} has leading/trailing whitespace: {value!r}")
        if not self.scale.min <= self.human_rating <= self.scale.max:
            raise ValueError(
                f"rating {self.human_rating} outside scale [{self.scale.min}, {self.scale.max}]"
            )

    @property
    def key(self) -> tuple[str, str, Role]:
        return (self.predicate, self.argument, self.role)


@dataclass(frozen=True)
class Provenance:
    """Source path plus the ordered log of transforms applied so far."""

    source: str
    transforms: tuple[str, ...] = ()

    def appended(self, entry: str) -> "Provenance":
        return Provenance(self.source, self.transforms + (entry,))


@dataclass(frozen=True)
class Dataset:
    """Named, ordered collection of norm items with its preprocessing log."""

    name: str
    items: tuple[NormItem, ...]
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.items)

    @property
    def scale(self) -> RatingScale:
        return self.items[0].scale

    def uses_argn_roles(self) -> bool:
        """True if any item carries a PropBank-style numbered role."""
        return any(item.role.is_argn for item in self.items)


@dataclass(frozen=True)
class ColumnSpec:
    """Column names and rating scale for a delimited norms file.

    The defaults describe the canonical TSV layout. ``dataset`` may be None
    for files without a dataset column; the dataset name then falls back to
    the ``name`` argument of :func:`load_dataset` or the file stem.
    """

    predicate: str = "predicate"
    argument: str = "argument"
    role: str = "role"
    rating: str = "rating"
    dataset: str | None = "dataset"
    item_id: str | None = None
    scale: RatingScale = RatingScale(1.0, 7.0)
    delimiter: str = "\t"


def load_dataset(path: str | Path, spec: ColumnSpec | None = None, name: str | None = None) -> Dataset:
    """Load a delimited norms file into a :class:`Dataset`.

    Rows become one item each, predicates and arguments lowercased; duplicate
    (predicate, argument, role) rows are NOT removed here (dedupe is an
    explicit step). Item ids are assigned from the source row order and stay
    stable through later preprocessing.
    """
    spec = spec or ColumnSpec()
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"norms file not found: {path}")

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path.name}: no data rows") from None
        columns = {spec.predicate, spec.argument, spec.role, spec.rating}
        if spec.dataset is not None and spec.dataset in header:
            columns.add(spec.dataset)
        if spec.item_id is not None:
            columns.add(spec.item_id)
        index: dict[str, int] = {}
        for column in columns:
            if column not in header:
                raise DataFormatError(f"{path.name}: missing column {column!r} in header")
            index[column] = header.index(column)
        rows = [(line_no, row) for line_no, row in enumerate(reader, start=2) if row]

    if not rows:
        raise DataFormatError(f"{path.name}: no data rows")

    dataset_name = name
    if dataset_name is None and spec.dataset is not None and spec.dataset in index:
        dataset_name = rows[0][1][index[spec.dataset]].strip()
    if not dataset_name:
        dataset_name = path.stem

    items: list[NormItem] = []
    for line_no, row in rows:
        if len(row) != len(header):
            raise DataFormatError(
                f"{path.name}: line {line_no}: expected {len(header)} columns, got {len(row)}"
            )
        rating_text = row[index[spec.rating]].strip()
        try:
            rating = float(rating_text)
        except ValueError:
            raise DataFormatError(
                f"{path.name}: line {line_no}: unparseable rating {rating_text!r}"
            ) from None
        if spec.item_id is not None:
            item_id = row[index[spec.item_id]].strip()
        else:
            item_id = f"{dataset_name}:{len(items)}"
        try:
            role = Role.parse(row[index[spec.role]].strip())
            item = NormItem(
                item_id=item_id,
                dataset=dataset_name,
                predicate=row[index[spec.predicate]].strip().lower(),
                argument=row[index[spec.argument]].strip().lower(),
                role=role,
                human_rating=rating,
                scale=spec.scale,
            )
        except ValueError as exc:
            raise DataFormatError(f"{path.name}: line {line_no}: {exc}") from None
        items.append(item)

    provenance = Provenance(source=str(path), transforms=(f"load: {len(items)} rows",))
    return Dataset(name=dataset_name, items=tuple(items), provenance=provenance)


def dedupe(dataset: Dataset) -> Dataset:
    """Drop repeated (predicate, argument, role) tuples, keeping the first.

    A repeat with a different rating is kept out all the same; it only earns
    a warning, since the first occurrence wins.
    """
    seen: dict[tuple[str, str, Role], NormItem] = {}
    kept: list[NormItem] = []
    removed = 0
    for item in dataset.items:
        first = seen.get(item.key)
        if first is None:
            seen[item.key] = item
            kept.append(item)
            continue
        removed += 1
        if first.human_rating != item.human_rating:
            logger.warning(
                "duplicate %s with conflicting ratings (%s vs %s); keeping first",
                item.key,
                first.human_rating,
                item.human_rating,
            )
    return Dataset(
        name=dataset.name,
        items=tuple(kept),
        provenance=dataset.provenance.appended(f"dedupe: removed {removed} rows"),
    )


def strip_indefinite_articles(dataset: Dataset) -> Dataset:
    """Remove leading "a "/"an " tokens from arguments.

    Strips repeatedly until no article token leads, so the operation is
    idempotent even for pathological arguments like "a a mall".
    """
    changed = 0
    items: list[NormItem] = []
    for item in dataset.items:
        argument = item.argument
        while True:
            head, _, rest = argument.partition(" ")
            if head in ("a", "an") and rest:
                argument = rest.lstrip()
            else:
                break
        if argument != item.argument:
            changed += 1
            item = replace(item, argument=argument)
        items.append(item)
    return Dataset(
        name=dataset.name,
        items=tuple(items),
        provenance=dataset.provenance.appended(f"strip_articles: modified {changed} arguments"),
    )


def normalize_rating(rating: float, scale: RatingScale) -> float:
    """Map a rating on ``scale`` linearly onto [0, 1]."""
    if not scale.min <= rating <= scale.max:
        raise ValueError(f"rating {rating} outside scale [{scale.min}, {scale.max}]")
    return (rating - scale.min) / (scale.max - scale.min)


def preprocess(dataset: Dataset) -> Dataset:
    """Standard preprocessing pipeline: dedupe, then strip indefinite articles."""
    return strip_indefinite_articles(dedupe(dataset))


def write_dataset(dataset: Dataset, path: str | Path, include_ids: bool = False) -> None:
    """Write a dataset back out in the canonical TSV format.

    With ``include_ids`` an extra ``item_id`` column is prepended so a reload
    (via ``ColumnSpec(item_id="item_id")``) preserves the original ids; run
    snapshots rely on this.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        prefix = "item_id\t" if include_ids else ""
        fh.write(f"{prefix}dataset\tpredicate\targument\trole\trating\n")
        for item in dataset.items:
            if include_ids:
                fh.write(f"{item.item_id}\t")
            fh.write(
                f"{item.dataset}\t{item.predicate}\t{item.argument}\t"
                f"{item.role.value}\t{item.human_rating:g}\n"
            )
