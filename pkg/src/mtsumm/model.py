"""Core domain records shared by every other module, plus structural validation.

All records are immutable (frozen dataclasses over tuples), so they are safe
to share across threads. The on-disk dataset format is JSON Lines, one
example per line, UTF-8, with field names matching the dataclass fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence

from .tokens import word_count

SPLITS = ("train", "validation", "test")

# Rendering of SQL NULL in cell values; one fixed token keeps linearization
# deterministic.
NULL_CELL = "none"


class EmptyDatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Table:
    """A named grid of header strings and cell strings.

    Rows may be empty (m = 0); every row must have exactly one cell per
    header.
    """

    name: str
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    @classmethod
    def make(cls, name: str, headers: Sequence[str], rows: Iterable[Sequence[str]]) -> "Table":
        return cls(name, tuple(headers), tuple(tuple(r) for r in rows))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.headers)

    def cell_values(self) -> list[str]:
        """All cell values in row-major order."""
        return [cell for row in self.rows for cell in row]

    def violations(self) -> list[str]:
        out = []
        if not self.name:
            out.append("table name empty")
        if not self.headers:
            out.append(f"table {self.name!r} has no headers")
        for j, h in enumerate(self.headers):
            if not h:
                out.append(f"table {self.name!r} header {j + 1} empty")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.headers):
                out.append(
                    f"table {self.name!r} row {i + 1} has {len(row)} cells, "
                    f"expected {len(self.headers)}"
                )
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "headers": list(self.headers),
            "rows": [list(r) for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Table":
        return cls.make(d["name"], d["headers"], d["rows"])


@dataclass(frozen=True)
class Example:
    """One dataset record: a query, its input tables, SQL, execution table,
    and reference summary.

    ``summary`` may be empty only before annotation. ``spider_split`` tags
    the source-corpus origin ("train" or "dev") while a dataset is being
    built; it is dropped from exports once splits are assigned.
    """

    id: str
    query: str
    sql: str
    database_id: str
    input_tables: tuple[Table, ...]
    execution_table: Table
    summary: str
    split: str
    spider_split: str | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "query": self.query,
            "sql": self.sql,
            "database_id": self.database_id,
            "input_tables": [t.to_dict() for t in self.input_tables],
            "execution_table": self.execution_table.to_dict(),
            "summary": self.summary,
            "split": self.split,
        }
        if self.spider_split is not None:
            d["spider_split"] = self.spider_split
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Example":
        return cls(
            id=d["id"],
            query=d["query"],
            sql=d["sql"],
            database_id=d["database_id"],
            input_tables=tuple(Table.from_dict(t) for t in d["input_tables"]),
            execution_table=Table.from_dict(d["execution_table"]),
            summary=d["summary"],
            split=d["split"],
            spider_split=d.get("spider_split"),
        )

    def with_summary(self, summary: str) -> "Example":
        return replace(self, summary=summary)

    def with_split(self, split: str) -> "Example":
        return replace(self, split=split)


@dataclass(frozen=True)
class DatasetStats:
    """Aggregate statistics over a list of examples."""

    split_counts: tuple[tuple[str, int], ...]
    single_table_fraction: float
    double_table_fraction: float
    many_table_fraction: float  # three or more tables
    mean_tables_per_example: float
    mean_summary_words: float

    def count(self, split: str) -> int:
        return dict(self.split_counts).get(split, 0)


def validate_example(example: Example) -> list[str]:
    """Return a list of invariant-violation descriptions, empty iff valid.

    Violations are data, not failures: callers decide what to do with them.
    """
    out = []
    if not example.id:
        out.append("id empty")
    if not example.input_tables:
        out.append("input_tables empty")
    for t in example.input_tables:
        out.extend(t.violations())
    out.extend(example.execution_table.violations())
    if example.split not in SPLITS:
        out.append(f"split {example.split!r} not one of {'/'.join(SPLITS)}")
    return out


def compute_stats(examples: Sequence[Example]) -> DatasetStats:
    """Dataset statistics: split counts, table-count fractions, means.

    Summary length counts word tokens of the shared tokenizer (punctuation
    tokens excluded).
    """
    if not examples:
        raise EmptyDatasetError("empty dataset")
    counts: dict[str, int] = {s: 0 for s in SPLITS}
    by_tables = {1: 0, 2: 0, 3: 0}  # 3 bucket means "3 or more"
    total_tables = 0
    total_words = 0
    for ex in examples:
        counts[ex.split] = counts.get(ex.split, 0) + 1
        k = len(ex.input_tables)
        by_tables[min(k, 3)] = by_tables.get(min(k, 3), 0) + 1
        total_tables += k
        total_words += word_count(ex.summary)
    n = len(examples)
    return DatasetStats(
        split_counts=tuple(sorted(counts.items())),
        single_table_fraction=by_tables[1] / n,
        double_table_fraction=by_tables[2] / n,
        many_table_fraction=by_tables[3] / n,
        mean_tables_per_example=total_tables / n,
        mean_summary_words=total_words / n,
    )


def write_jsonl(examples: Iterable[Example], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_dict(), ensure_ascii=False) + "\n")


def read_jsonl(path) -> list[Example]:
    return list(iter_jsonl(path))


def iter_jsonl(path) -> Iterator[Example]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield Example.from_dict(json.loads(line))
