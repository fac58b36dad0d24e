from __future__ import annotations

import json
from pathlib import Path

import pytest

from mtsumm.gateway import MockGateway
from mtsumm.model import Example, Table, read_jsonl

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"
DB_DIR = DATA_DIR / "databases"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def fixture_examples() -> list[Example]:
    return read_jsonl(DATA_DIR / "fixture_dataset.jsonl")


@pytest.fixture(scope="session")
def mock_rules() -> list[tuple[tuple[str, ...], str]]:
    spec = json.loads((DATA_DIR / "mock_completions.json").read_text(encoding="utf-8"))
    return [(tuple(needles), response) for needles, response in spec["rules"]]


@pytest.fixture()
def mock_gateway(mock_rules) -> MockGateway:
    return MockGateway(rules=mock_rules)


@pytest.fixture()
def spider_dir(tmp_path, data_dir) -> Path:
    """A minimal Spider-shaped distribution over the fixture database."""
    import shutil

    root = tmp_path / "spider"
    db_dir = root / "database" / "course_teach"
    db_dir.mkdir(parents=True)
    shutil.copy(data_dir / "databases" / "course_teach" / "course_teach.sqlite",
                db_dir / "course_teach.sqlite")
    (root / "tables.json").write_text(json.dumps([{
        "db_id": "course_teach",
        "table_names_original": ["teacher", "course", "course_arrange"],
    }]))

    def rec(question, query, table_idxs, db_id="course_teach"):
        return {
            "db_id": db_id,
            "question": question,
            "query": query,
            "sql": {"from": {"table_units": [["table_unit", i]
                                             for i in table_idxs]}},
        }

    (root / "train_spider.json").write_text(json.dumps([
        rec("List the names of the teachers.",
            "SELECT Name FROM teacher ORDER BY Name", [0]),
        rec("Broken database reference.", "SELECT 1", [0], db_id="no_such_db"),
        rec("Broken SQL.", "SELECT missing_col FROM teacher", [0]),
        rec("How many courses are there?", "SELECT count(*) FROM course", [1]),
        rec("Which teachers teach which courses?",
            "SELECT T2.Name, T3.Course FROM course_arrange AS T1 "
            "JOIN teacher AS T2 ON T1.Teacher_ID = T2.Teacher_ID "
            "JOIN course AS T3 ON T1.Course_ID = T3.Course_ID "
            "ORDER BY T2.Name, T3.Course", [2, 0, 1]),
    ]))
    (root / "dev.json").write_text(json.dumps([
        rec("How many teachers are there?", "SELECT count(*) FROM teacher", [0]),
    ]))
    return root


@pytest.fixture()
def semester_table() -> Table:
    return Table.make("semesters", ["semester_name", "semester_id"],
                      [["summer 2010", "2"]])


@pytest.fixture()
def teacher_table() -> Table:
    return Table.make(
        "teacher",
        ["Teacher_ID", "Name", "Age", "Hometown"],
        [["1", "Kearsley Brown", "32", "Vancouver"],
         ["2", "Vicente Carretero", "26", "Madrid"],
         ["3", "Gustaaf Deloor", "29", "Bilbao"],
         ["4", "Anne Walker", "39", "London"],
         ["5", "Lucy Wong", "29", "Hong Kong"]],
    )
