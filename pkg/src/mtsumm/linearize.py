"""Flatten tables into the sentinel-delimited text format used in prompts.

A table named ``t`` with headers h1..hn and rows c_ij becomes::

    <table_name>: t col: h1 | ... | hn row 1: c11 | ... | c1n ... row m: cm1 | ... | cmn

Single spaces separate segments, " | " separates cells. Cells containing the
"|" delimiter are kept verbatim (no escaping); leading/trailing cell
whitespace is trimmed so golden files stay stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import Table


class InvalidTableError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class LinearizedText:
    text: str
    source_table_names: tuple[str, ...]


def linearize_table(table: Table) -> LinearizedText:
    """Serialize one table. Raises InvalidTableError on structural violations."""
    violations = table.violations()
    if violations:
        raise InvalidTableError(violations)
    parts = [f"<table_name>: {table.name}"]
    parts.append("col: " + " | ".join(h.strip() for h in table.headers))
    for i, row in enumerate(table.rows, start=1):
        parts.append(f"row {i}: " + " | ".join(cell.strip() for cell in row))
    return LinearizedText(text=" ".join(parts), source_table_names=(table.name,))


def linearize_model_input(query: str, tables: Sequence[Table]) -> str:
    """Concatenate the query with all linearized tables, in input order."""
    if not tables:
        raise ValueError("no input tables to linearize")
    return " ".join([query] + [linearize_table(t).text for t in tables])
