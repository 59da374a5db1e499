from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from themfit.norms import (
    ColumnSpec,
    DataFormatError,
    NormItem,
    RatingScale,
    Role,
    dedupe,
    load_dataset,
    normalize_rating,
    strip_indefinite_articles,
)

from conftest import SCALE_17, write_tsv


class TestRole:
    def test_parse_all_five(self):
        for text in ("Arg0", "Arg1", "Arg2", "Instrument", "Location"):
            assert Role.parse(text).value == text

    @pytest.mark.parametrize("bad", ["arg1", "ARG1", "Agent", "Patient", "", "Arg3"])
    def test_parse_rejects_other_strings(self, bad):
        with pytest.raises(ValueError, match="unknown role"):
            Role.parse(bad)

    def test_is_argn(self):
        assert Role.ARG0.is_argn and Role.ARG2.is_argn
        assert not Role.LOCATION.is_argn


class TestRatingScale:
    def test_requires_min_below_max(self):
        with pytest.raises(ValueError):
            RatingScale(7, 1)
        with pytest.raises(ValueError):
            RatingScale(3, 3)


class TestNormItem:
    def test_rejects_empty_and_padded_fields(self):
        with pytest.raises(ValueError):
            NormItem("x:0", "x", "", "pizza", Role.ARG1, 4, SCALE_17)
        with pytest.raises(ValueError):
            NormItem("x:0", "x", "eat", " pizza", Role.ARG1, 4, SCALE_17)

    def test_rejects_rating_outside_scale(self):
        with pytest.raises(ValueError):
            NormItem("x:0", "x", "eat", "pizza", Role.ARG1, 7.5, SCALE_17)


class TestLoadDataset:
    def test_loads_rows_and_lowercases(self, tmp_path):
        path = write_tsv(
            tmp_path / "t.tsv",
            [("demo", "Eat", "Pizza", "Arg1", "7"), ("demo", "eat", "rock", "Arg1", "1.5")],
        )
        dataset = load_dataset(path)
        assert len(dataset) == 2
        assert dataset.items[0].predicate == "eat"
        assert dataset.items[0].argument == "pizza"
        assert dataset.items[0].human_rating == 7.0
        assert dataset.name == "demo"

    def test_item_ids_are_unique_and_stable(self, tmp_path):
        path = write_tsv(
            tmp_path / "t.tsv",
            [("demo", "eat", "pizza", "Arg1", "7"), ("demo", "eat", "rock", "Arg1", "1")],
        )
        dataset = load_dataset(path)
        assert [item.item_id for item in dataset.items] == ["demo:0", "demo:1"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_dataset(tmp_path / "nope.tsv")

    def test_empty_file_reports_no_data_rows(self, tmp_path):
        path = tmp_path / "empty.tsv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DataFormatError, match="no data rows"):
            load_dataset(path)

    def test_header_only_reports_no_data_rows(self, tmp_path):
        path = tmp_path / "h.tsv"
        path.write_text("dataset\tpredicate\targument\trole\trating\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="no data rows"):
            load_dataset(path)

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text(
            "dataset\tpredicate\targument\trole\trating\n"
            "demo\teat\tpizza\tArg1\t7\n"
            "demo\teat\tArg1\t6\n",
            encoding="utf-8",
        )
        with pytest.raises(DataFormatError, match="line 3"):
            load_dataset(path)

    def test_unparseable_rating_names_line(self, tmp_path):
        path = write_tsv(tmp_path / "bad.tsv", [("demo", "eat", "pizza", "Arg1", "seven")])
        with pytest.raises(DataFormatError, match="line 2.*seven"):
            load_dataset(path)

    def test_unknown_role_names_line(self, tmp_path):
        path = write_tsv(tmp_path / "bad.tsv", [("demo", "eat", "pizza", "Agent", "7")])
        with pytest.raises(DataFormatError, match="line 2.*Agent"):
            load_dataset(path)

    def test_column_mapping_adapts_other_layouts(self, tmp_path):
        path = tmp_path / "alt.csv"
        path.write_text(
            "verb,noun,slot,score\neat,pizza,Arg1,0.9\n",
            encoding="utf-8",
        )
        spec = ColumnSpec(
            predicate="verb",
            argument="noun",
            role="slot",
            rating="score",
            dataset=None,
            scale=RatingScale(0.0, 1.0),
            delimiter=",",
        )
        dataset = load_dataset(path, spec=spec, name="alt")
        assert dataset.items[0].human_rating == 0.9
        assert dataset.name == "alt"

    def test_duplicates_not_removed_at_load(self, tmp_path):
        rows = [("demo", "eat", "pizza", "Arg1", "7")] * 3
        dataset = load_dataset(write_tsv(tmp_path / "d.tsv", rows))
        assert len(dataset) == 3


class TestDedupe:
    def test_keeps_first_of_conflicting_duplicates(self, tmp_path):
        rows = [("demo", "eat", "pizza", "Arg1", "7"), ("demo", "eat", "pizza", "Arg1", "2")]
        dataset = dedupe(load_dataset(write_tsv(tmp_path / "d.tsv", rows)))
        assert len(dataset) == 1
        assert dataset.items[0].human_rating == 7.0
        assert "dedupe: removed 1 rows" in dataset.provenance.transforms

    def test_no_duplicates_is_identity(self, tmp_path):
        rows = [("demo", "eat", "pizza", "Arg1", "7"), ("demo", "eat", "rock", "Arg1", "1")]
        raw = load_dataset(write_tsv(tmp_path / "d.tsv", rows))
        deduped = dedupe(raw)
        assert deduped.items == raw.items
        assert "dedupe: removed 0 rows" in deduped.provenance.transforms

    def test_idempotent(self, tmp_path):
        rows = [
            ("demo", "eat", "pizza", "Arg1", "7"),
            ("demo", "eat", "pizza", "Arg1", "2"),
            ("demo", "eat", "rock", "Arg1", "1"),
        ]
        once = dedupe(load_dataset(write_tsv(tmp_path / "d.tsv", rows)))
        twice = dedupe(once)
        assert twice.items == once.items

    def test_counts_add_up(self, tmp_path):
        rows = [("demo", "eat", "pizza", "Arg1", "7")] * 5 + [
            ("demo", "eat", "rock", "Arg1", "1")
        ]
        raw = load_dataset(write_tsv(tmp_path / "d.tsv", rows))
        deduped = dedupe(raw)
        removed = int(deduped.provenance.transforms[-1].split()[-2])
        assert len(deduped) + removed == len(raw)


class TestStripArticles:
    @pytest.mark.parametrize(
        "argument,expected",
        [("a mall", "mall"), ("an office", "office"), ("apple", "apple"), ("a a mall", "mall")],
    )
    def test_strips_whole_leading_tokens(self, tmp_path, argument, expected):
        dataset = load_dataset(
            write_tsv(tmp_path / "s.tsv", [("demo", "study", argument, "Location", "5")])
        )
        stripped = strip_indefinite_articles(dataset)
        assert stripped.items[0].argument == expected

    def test_idempotent(self, tmp_path):
        rows = [
            ("demo", "study", "a mall", "Location", "5"),
            ("demo", "study", "a an attic", "Location", "4"),
            ("demo", "study", "anchor", "Location", "3"),
        ]
        once = strip_indefinite_articles(load_dataset(write_tsv(tmp_path / "s.tsv", rows)))
        twice = strip_indefinite_articles(once)
        assert [i.argument for i in twice.items] == [i.argument for i in once.items]

    def test_logs_count(self, tmp_path):
        rows = [
            ("demo", "study", "a mall", "Location", "5"),
            ("demo", "study", "kitchen", "Location", "4"),
        ]
        stripped = strip_indefinite_articles(load_dataset(write_tsv(tmp_path / "s.tsv", rows)))
        assert "strip_articles: modified 1 arguments" in stripped.provenance.transforms


class TestNormalizeRating:
    def test_endpoints_map_exactly(self):
        assert normalize_rating(1, SCALE_17) == 0.0
        assert normalize_rating(7, SCALE_17) == 1.0

    def test_interior_value(self):
        assert normalize_rating(6.5, SCALE_17) == pytest.approx(0.91667, abs=1e-5)

    def test_rejects_out_of_scale(self):
        with pytest.raises(ValueError):
            normalize_rating(0.5, SCALE_17)

    @given(
        st.tuples(
            st.floats(min_value=1, max_value=7, allow_nan=False),
            st.floats(min_value=1, max_value=7, allow_nan=False),
        ).filter(lambda pair: abs(pair[0] - pair[1]) > 1e-9)
    )
    def test_strictly_increasing(self, pair):
        low, high = sorted(pair)
        assert normalize_rating(low, SCALE_17) < normalize_rating(high, SCALE_17)
