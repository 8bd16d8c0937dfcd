"""CSV ingestion contract: parsing, kind inference, numeric extraction."""

import csv
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schemafit.errors import KindError, ParseError
from schemafit.ingest import (
    RawColumn,
    infer_kind,
    load_table,
    split_columns,
    to_numeric_column,
    write_table,
)


def write(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadTable:
    def test_basic(self, tmp_path):
        t = load_table(write(tmp_path, "a,b\n1,x\n2,y\n"))
        assert [c.name for c in t.columns] == ["a", "b"]
        assert t.row_count == 2
        assert t.column("a").cells == ("1", "2")
        assert t.name == "t"

    def test_null_tokens_case_insensitive_trimmed(self, tmp_path):
        t = load_table(write(tmp_path, 'a\n""\nNA\n null \nnA\n0\n'))
        assert t.column("a").cells == (None, None, None, None, "0")

    def test_blank_lines_skipped(self, tmp_path):
        t = load_table(write(tmp_path, "a,b\n1,2\n\n3,4\n\n"))
        assert t.row_count == 2

    def test_custom_null_tokens(self, tmp_path):
        t = load_table(write(tmp_path, "a\nNA\n-\n"), null_tokens={"-"})
        assert t.column("a").cells == ("NA", None)

    def test_duplicate_header_rejected(self, tmp_path):
        with pytest.raises(ParseError, match="duplicate"):
            load_table(write(tmp_path, "a,b,A \n1,2,3\n"))

    def test_ragged_row_names_the_row(self, tmp_path):
        with pytest.raises(ParseError, match=r"row 2"):
            load_table(write(tmp_path, "a,b\n1,2\n3\n"))

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(ParseError, match="header"):
            load_table(write(tmp_path, ""))

    def test_blank_header_name_rejected(self, tmp_path):
        with pytest.raises(ParseError, match="blank"):
            load_table(write(tmp_path, "a,,c\n1,2,3\n"))

    def test_semicolon_delimiter(self, tmp_path):
        t = load_table(write(tmp_path, "a;b\n1;2\n"), delimiter=";")
        assert t.column("b").cells == ("2",)

    def test_name_override(self, tmp_path):
        t = load_table(write(tmp_path, "a\n1\n"), name="2007")
        assert t.name == "2007"

    def test_quoted_cells_keep_delimiters(self, tmp_path):
        t = load_table(write(tmp_path, 'a,b\n"1,5",2\n'))
        assert t.column("a").cells == ("1,5",)


class TestInferKind:
    def test_all_numeric(self):
        assert infer_kind(RawColumn("a", ("1", "2.5", "-3e2"))) == "numeric"

    def test_two_thirds_parse_is_not_enough(self):
        # 2 of 3 non-null cells parse: 0.667 < 0.99.
        col = RawColumn("a", ("1", "2", None, "x"))
        assert infer_kind(col, threshold=0.99) == "non_numeric"
        assert infer_kind(col, threshold=0.5) == "numeric"

    def test_nulls_do_not_count_against(self):
        assert infer_kind(RawColumn("a", (None, "1", None))) == "numeric"

    def test_all_null_is_non_numeric(self):
        assert infer_kind(RawColumn("a", (None, None))) == "non_numeric"

    def test_non_finite_text_rejected(self):
        assert infer_kind(RawColumn("a", ("inf", "nan"))) == "non_numeric"


class TestToNumericColumn:
    def test_counts_conserved(self):
        col = RawColumn("a", ("1", None, "2", None, "3"))
        nc = to_numeric_column(col, "2007")
        assert nc.values == (1.0, 2.0, 3.0)
        assert nc.dropped_nulls == 2
        assert nc.dropped_non_numeric == 0
        assert len(nc.values) + nc.dropped_nulls + nc.dropped_non_numeric == len(col.cells)
        assert nc.release == "2007"

    def test_non_numeric_column_raises(self):
        with pytest.raises(KindError):
            to_numeric_column(RawColumn("a", ("x", "y")), "2007")

    def test_force_extraction_counts_bad_cells(self):
        col = RawColumn("a", ("1", "x", None))
        nc = to_numeric_column(col, "2007", require_numeric=False)
        assert nc.values == (1.0,)
        assert nc.dropped_non_numeric == 1
        assert nc.dropped_nulls == 1


class TestSplitColumns:
    def test_partition(self, tmp_path):
        t = load_table(write(tmp_path, "id,city\n1,sp\n2,rj\n"), name="2007")
        numeric, other = split_columns(t)
        assert [c.name for c in numeric] == ["id"]
        assert other == ["city"]
        assert numeric[0].release == "2007"


csv_cell = st.text(
    alphabet=st.characters(
        blacklist_categories=("Cs",), blacklist_characters="\r\n\x00"
    ),
    max_size=8,
)


@settings(max_examples=50, deadline=None)
@given(
    ncols=st.integers(1, 4),
    rows=st.lists(st.lists(csv_cell, min_size=4, max_size=4), max_size=6),
)
def test_round_trip(tmp_path_factory, ncols, rows):
    """write_table(load_table(f)) re-loads to the identical table."""
    tmp = tmp_path_factory.mktemp("rt")
    header = [f"c{i}" for i in range(ncols)]
    p = tmp / "in.csv"
    with p.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(row[:ncols] for row in rows)
    t1 = load_table(p)
    q = tmp / "out.csv"
    write_table(t1, q)
    t2 = load_table(q, name=t1.name)
    assert t1 == t2


@given(
    cells=st.lists(
        st.one_of(
            st.none(),
            st.floats(allow_nan=False, allow_infinity=False, width=32).map(str),
            st.text(st.characters(categories=("Ll",)), min_size=1, max_size=4),
        ),
        max_size=30,
    )
)
def test_extraction_conserves_counts(cells):
    col = RawColumn("a", tuple(cells))
    nc = to_numeric_column(col, "y", require_numeric=False)
    assert len(nc.values) + nc.dropped_nulls + nc.dropped_non_numeric == len(cells)
    assert all(math.isfinite(v) for v in nc.values)
