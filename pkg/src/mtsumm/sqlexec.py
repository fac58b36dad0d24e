"""Load SQLite databases and produce execution tables from read-only SQL.

Databases follow the layout used by text-to-SQL distributions: a single
.sqlite file per database. Only single SELECT statements are permitted;
anything that could mutate source data is rejected before execution, and
connections are additionally opened read-only.
"""

from __future__ import annotations

import re
import sqlite3
from pathlib import Path
from typing import Sequence

from .model import NULL_CELL, Table


class DatabaseOpenError(RuntimeError):
    pass


class SqlRejectedError(ValueError):
    """Statement failed the read-only classifier; nothing was executed."""


class SqlExecutionError(RuntimeError):
    pass


class UnknownTableError(KeyError):
    pass


_COMMENT_RE = re.compile(r"--[^\n]*|/\*.*?\*/", re.DOTALL)


def _render_cell(value) -> str:
    # Cell values keep the engine's text conversion; NULL becomes "none".
    if value is None:
        return NULL_CELL
    if isinstance(value, bytes):
        return value.decode("utf-8", errors="replace")
    return str(value)


class DatabaseHandle:
    """One handle = one read-only connection. Not shared across threads."""

    def __init__(self, database_id: str, path: Path, connection: sqlite3.Connection,
                 table_names: list[str]):
        self.database_id = database_id
        self.path = path
        self.table_names = table_names
        self._conn = connection

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> "DatabaseHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def load_database(path) -> DatabaseHandle:
    """Open a database file and enumerate its user tables."""
    p = Path(path)
    if not p.is_file():
        raise DatabaseOpenError(f"database open failed: {p} does not exist")
    try:
        conn = sqlite3.connect(f"file:{p}?mode=ro", uri=True)
        cur = conn.execute(
            "SELECT name FROM sqlite_master "
            "WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY rowid"
        )
        names = [row[0] for row in cur.fetchall()]
    except sqlite3.Error as exc:
        raise DatabaseOpenError(f"database open failed: {exc}") from exc
    return DatabaseHandle(p.stem, p, conn, names)


def classify_readonly(sql: str) -> None:
    """Reject anything that is not a single SELECT statement."""
    stripped = _COMMENT_RE.sub(" ", sql).strip()
    if not stripped:
        raise SqlRejectedError("empty statement")
    body = stripped.rstrip(";").strip()
    if ";" in body:
        raise SqlRejectedError("multiple statements are not allowed")
    first = body.split(None, 1)[0].lower()
    if first not in ("select", "with"):
        raise SqlRejectedError(f"only SELECT statements are allowed, got {first!r}")


def execute_sql(handle: DatabaseHandle, sql: str) -> Table:
    """Run a read-only query; the result becomes a Table named "result".

    Headers are the engine's result-column labels (computed columns keep
    labels like "count(*)" verbatim); rows stay in engine order, duplicates
    preserved.
    """
    classify_readonly(sql)
    try:
        cur = handle._conn.execute(sql)
        rows = cur.fetchall()
    except sqlite3.Error as exc:
        raise SqlExecutionError(f"execution failed: {exc}") from exc
    headers = tuple(col[0] for col in (cur.description or ()))
    return Table(
        name="result",
        headers=headers,
        rows=tuple(tuple(_render_cell(v) for v in row) for row in rows),
    )


def extract_input_tables(handle: DatabaseHandle, table_names: Sequence[str]) -> list[Table]:
    """Read the full contents of each named table, column order as stored."""
    known = {n.lower(): n for n in handle.table_names}
    out = []
    for requested in table_names:
        actual = known.get(requested.lower())
        if actual is None:
            raise UnknownTableError(f"no table named {requested!r} in {handle.database_id}")
        quoted = actual.replace('"', '""')
        result = execute_sql(handle, f'SELECT * FROM "{quoted}"')
        out.append(Table(name=actual, headers=result.headers, rows=result.rows))
    return out
