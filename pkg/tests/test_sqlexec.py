from __future__ import annotations

import sqlite3
from collections import Counter

import pytest

from mtsumm.linearize import linearize_table
from mtsumm.sqlexec import (DatabaseOpenError, SqlExecutionError,
                            SqlRejectedError, UnknownTableError,
                            classify_readonly, execute_sql,
                            extract_input_tables, load_database)
from test_linearize import parse_linearized

TEACHERS = {"Kearsley Brown", "Vicente Carretero", "Gustaaf Deloor",
            "Anne Walker", "Lucy Wong"}


@pytest.fixture()
def course_db(data_dir):
    handle = load_database(data_dir / "databases" / "course_teach" / "course_teach.sqlite")
    yield handle
    handle.close()


@pytest.fixture()
def college_db(data_dir):
    handle = load_database(data_dir / "databases" / "college" / "college.sqlite")
    yield handle
    handle.close()


class TestLoadDatabase:
    def test_fixture_tables_enumerated(self, course_db):
        assert course_db.table_names == ["teacher", "course", "course_arrange"]
        assert course_db.database_id == "course_teach"

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatabaseOpenError, match="database open failed"):
            load_database(tmp_path / "nope.sqlite")

    def test_empty_database(self, tmp_path):
        path = tmp_path / "empty.sqlite"
        sqlite3.connect(path).close()
        handle = load_database(path)
        assert handle.table_names == []
        handle.close()

    def test_context_manager_closes(self, data_dir):
        path = data_dir / "databases" / "college" / "college.sqlite"
        with load_database(path) as handle:
            assert handle.table_names
        with pytest.raises(sqlite3.ProgrammingError):
            handle._conn.execute("SELECT 1")


class TestClassifyReadonly:
    @pytest.mark.parametrize("sql", [
        "SELECT 1",
        "  select name from teacher  ",
        "WITH t AS (SELECT 1 AS x) SELECT x FROM t",
        "SELECT 1; ",
        "-- comment\nSELECT 1",
        "/* block */ SELECT 2",
    ])
    def test_accepts_selects(self, sql):
        classify_readonly(sql)

    @pytest.mark.parametrize("sql", [
        "INSERT INTO t VALUES (1)",
        "UPDATE t SET a = 1",
        "DELETE FROM t",
        "DROP TABLE t",
        "PRAGMA user_version = 3",
        "CREATE TABLE t (a)",
        "ATTACH DATABASE 'x' AS y",
    ])
    def test_rejects_mutations(self, sql):
        with pytest.raises(SqlRejectedError):
            classify_readonly(sql)

    def test_rejects_multiple_statements(self):
        with pytest.raises(SqlRejectedError, match="multiple statements"):
            classify_readonly("SELECT 1; SELECT 2")

    def test_rejects_empty(self):
        with pytest.raises(SqlRejectedError, match="empty statement"):
            classify_readonly("  -- nothing\n")


class TestExecuteSql:
    def test_semester_execution_table(self, college_db):
        sql = ("SELECT T1.semester_name, T1.semester_id FROM semesters AS T1 "
               "JOIN student_enrolment AS T2 ON T1.semester_id = T2.semester_id "
               "GROUP BY T1.semester_id ORDER BY count(*) DESC LIMIT 1")
        table = execute_sql(college_db, sql)
        assert table.name == "result"
        assert table.headers == ("semester_name", "semester_id")
        assert table.rows == (("summer 2010", "2"),)

    def test_zero_row_result(self, course_db):
        table = execute_sql(course_db, "SELECT 1 WHERE 0")
        assert table.rows == ()

    def test_join_and_count_per_teacher(self, course_db):
        sql = ("SELECT T2.Name, count(*) FROM course_arrange AS T1 "
               "JOIN teacher AS T2 ON T1.Teacher_ID = T2.Teacher_ID "
               "GROUP BY T2.Name ORDER BY T2.Name")
        table = execute_sql(course_db, sql)
        assert table.headers == ("Name", "count(*)")
        assert table.rows == (
            ("Anne Walker", "2"),
            ("Gustaaf Deloor", "1"),
            ("Kearsley Brown", "1"),
            ("Lucy Wong", "1"),
            ("Vicente Carretero", "1"),
        )

    def test_unordered_query_row_multiset(self, course_db):
        table = execute_sql(course_db, "SELECT Name FROM teacher")
        assert Counter(r[0] for r in table.rows) == Counter(TEACHERS)

    def test_ordered_query_deterministic(self, course_db):
        sql = "SELECT Name FROM teacher ORDER BY Age, Name"
        assert execute_sql(course_db, sql) == execute_sql(course_db, sql)

    def test_duplicate_rows_preserved(self, course_db):
        table = execute_sql(
            course_db, "SELECT Age FROM teacher WHERE Age = 29 ORDER BY Teacher_ID")
        assert table.rows == (("29",), ("29",))

    def test_null_rendered_as_none(self, course_db):
        table = execute_sql(course_db, "SELECT NULL AS x")
        assert table.rows == (("none",),)

    def test_syntax_error(self, course_db):
        with pytest.raises(SqlExecutionError, match="execution failed"):
            execute_sql(course_db, "SELECT FROM WHERE")

    def test_mutation_rejected_before_execution(self, course_db):
        with pytest.raises(SqlRejectedError):
            execute_sql(course_db, "DELETE FROM teacher")

    def test_connection_is_readonly(self, course_db):
        # Defense in depth: even bypassing the classifier, the connection
        # itself refuses writes.
        with pytest.raises(sqlite3.OperationalError):
            course_db._conn.execute("INSERT INTO course VALUES (9, 'Art')")


class TestExtractInputTables:
    def test_identity_read(self, course_db, teacher_table):
        (table,) = extract_input_tables(course_db, ["teacher"])
        assert table == teacher_table

    def test_request_order(self, course_db):
        tables = extract_input_tables(course_db, ["course_arrange", "teacher"])
        assert [t.name for t in tables] == ["course_arrange", "teacher"]

    def test_case_insensitive_lookup(self, course_db):
        (table,) = extract_input_tables(course_db, ["Teacher"])
        assert table.name == "teacher"

    def test_unknown_table(self, course_db):
        with pytest.raises(UnknownTableError, match="NoSuchTable"):
            extract_input_tables(course_db, ["NoSuchTable"])

    def test_extract_then_linearize_round_trips(self, course_db):
        for name in course_db.table_names:
            (table,) = extract_input_tables(course_db, [name])
            assert parse_linearized(linearize_table(table).text) == table
