from __future__ import annotations

import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtsumm.linearize import InvalidTableError, linearize_model_input, linearize_table
from mtsumm.model import Table

SEMESTER_GOLDEN = ("<table_name>: semesters col: semester_name | semester_id "
                   "row 1: summer 2010 | 2")


def parse_linearized(text: str) -> Table:
    """Test-side inverse of linearize_table, valid for delimiter-free cells."""
    m = re.match(r"<table_name>: (.*?) col: (.*)$", text, re.DOTALL)
    assert m, f"not a linearized table: {text[:80]!r}"
    name, rest = m.group(1), m.group(2)
    parts = re.split(r" row \d+: ", rest)
    headers = parts[0].split(" | ")
    rows = [part.split(" | ") for part in parts[1:]]
    return Table.make(name, headers, rows)


class TestLinearizeTable:
    def test_semester_golden(self, semester_table):
        assert linearize_table(semester_table).text == SEMESTER_GOLDEN

    def test_zero_row_table(self):
        t = Table.make("t", ["A", "B"], [])
        assert linearize_table(t).text == "<table_name>: t col: A | B"

    def test_two_by_two_golden(self):
        t = Table.make("grid", ["x", "y"], [["a", "b"], ["c", "d"]])
        assert linearize_table(t).text == (
            "<table_name>: grid col: x | y row 1: a | b row 2: c | d")

    def test_source_table_names(self, semester_table):
        assert linearize_table(semester_table).source_table_names == ("semesters",)

    def test_cell_whitespace_trimmed(self):
        t = Table.make("t", [" A ", "B"], [[" 1 ", "2 "]])
        assert linearize_table(t).text == "<table_name>: t col: A | B row 1: 1 | 2"

    def test_invalid_table_rejected_with_violations(self):
        t = Table.make("t", ["a", "b"], [["only-one"]])
        with pytest.raises(InvalidTableError) as err:
            linearize_table(t)
        assert any("row 1 has 1 cells" in v for v in err.value.violations)

    def test_one_col_segment_per_table(self, teacher_table, semester_table):
        for t in (teacher_table, semester_table):
            assert linearize_table(t).text.count("col:") == 1

    def test_length_grows_linearly_in_rows(self):
        def text_for(n):
            t = Table.make("t", ["a", "b"], [["xx", "yy"]] * n)
            return linearize_table(t).text

        d1 = len(text_for(6)) - len(text_for(3))
        d2 = len(text_for(9)) - len(text_for(6))
        assert d1 == d2


class TestLinearizeModelInput:
    def test_single_table(self, semester_table):
        out = linearize_model_input("q?", [semester_table])
        assert out == "q? " + SEMESTER_GOLDEN

    def test_order_sensitivity(self, semester_table, teacher_table):
        ab = linearize_model_input("q?", [semester_table, teacher_table])
        ba = linearize_model_input("q?", [teacher_table, semester_table])
        assert ab != ba
        assert ab == "q? " + linearize_table(semester_table).text + " " + \
            linearize_table(teacher_table).text

    def test_empty_table_list_rejected(self):
        with pytest.raises(ValueError):
            linearize_model_input("q?", [])


words = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_", min_size=1, max_size=8)
cells = st.builds(" ".join, st.lists(words, min_size=1, max_size=3))


@st.composite
def safe_tables(draw):
    n_cols = draw(st.integers(min_value=1, max_value=4))
    name = draw(words)
    headers = [draw(cells) for _ in range(n_cols)]
    n_rows = draw(st.integers(min_value=0, max_value=5))
    rows = [[draw(cells) for _ in range(n_cols)] for _ in range(n_rows)]
    return Table.make(name, headers, rows)


class TestRoundTrip:
    @given(safe_tables())
    def test_parser_recovers_table(self, table):
        assert parse_linearized(linearize_table(table).text) == table

    def test_fixture_tables_round_trip(self, fixture_examples):
        for ex in fixture_examples:
            for t in list(ex.input_tables) + [ex.execution_table]:
                assert parse_linearized(linearize_table(t).text) == t
