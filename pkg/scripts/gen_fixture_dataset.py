#!/usr/bin/env python3
"""Build the bundled test fixtures: two small SQLite databases, the
10-example dataset JSONL derived from them, the mock completion rules for
offline summarization runs, and the golden files (prompts, annotation
prompt, end-to-end score report).

Run once from the repository root:

    python3 scripts/gen_fixture_dataset.py

All outputs live under tests/data/ and are committed. Regenerate only when
the prompt templates or fixture content intentionally change, and review the
diff when you do.
"""

from __future__ import annotations

import json
import sqlite3
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

import sys
sys.path.insert(0, str(ROOT / "src"))

from mtsumm.build import BuildConfig, build_annotation_prompt  # noqa: E402
from mtsumm.controller import (build_direct_prompt, build_reason_prompt,  # noqa: E402
                               build_summarize_prompt, run_batch)
from mtsumm.gateway import MockGateway  # noqa: E402
from mtsumm.harness import evaluate_run, render_report  # noqa: E402
from mtsumm.model import Example, write_jsonl  # noqa: E402
from mtsumm.sqlexec import execute_sql, extract_input_tables, load_database  # noqa: E402


def build_course_teach(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists():
        path.unlink()
    conn = sqlite3.connect(path)
    conn.executescript("""
        CREATE TABLE teacher (
            Teacher_ID INTEGER PRIMARY KEY,
            Name TEXT,
            Age INTEGER,
            Hometown TEXT
        );
        CREATE TABLE course (
            Course_ID INTEGER PRIMARY KEY,
            Course TEXT
        );
        CREATE TABLE course_arrange (
            Course_ID INTEGER,
            Teacher_ID INTEGER,
            Grade INTEGER
        );
    """)
    conn.executemany("INSERT INTO teacher VALUES (?, ?, ?, ?)", [
        (1, "Kearsley Brown", 32, "Vancouver"),
        (2, "Vicente Carretero", 26, "Madrid"),
        (3, "Gustaaf Deloor", 29, "Bilbao"),
        (4, "Anne Walker", 39, "London"),
        (5, "Lucy Wong", 29, "Hong Kong"),
    ])
    conn.executemany("INSERT INTO course VALUES (?, ?)", [
        (1, "Math"), (2, "Science"), (3, "History"), (4, "Bible"), (5, "Music"),
    ])
    conn.executemany("INSERT INTO course_arrange VALUES (?, ?, ?)", [
        (1, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 7), (4, 4, 6), (5, 5, 4),
    ])
    conn.commit()
    conn.close()


def build_college(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists():
        path.unlink()
    conn = sqlite3.connect(path)
    conn.executescript("""
        CREATE TABLE semesters (
            semester_id INTEGER PRIMARY KEY,
            semester_name TEXT
        );
        CREATE TABLE students (
            student_id INTEGER PRIMARY KEY,
            first_name TEXT,
            last_name TEXT
        );
        CREATE TABLE student_enrolment (
            student_enrolment_id INTEGER PRIMARY KEY,
            semester_id INTEGER,
            student_id INTEGER
        );
    """)
    conn.executemany("INSERT INTO semesters VALUES (?, ?)", [
        (1, "spring 2010"), (2, "summer 2010"), (3, "fall 2010"),
    ])
    conn.executemany("INSERT INTO students VALUES (?, ?, ?)", [
        (1, "Emma", "Clarke"), (2, "Liam", "Shah"), (3, "Olivia", "Reyes"),
        (4, "Noah", "Fischer"), (5, "Ava", "Moretti"),
    ])
    conn.executemany("INSERT INTO student_enrolment VALUES (?, ?, ?)", [
        (1, 1, 1), (2, 1, 2), (3, 2, 1), (4, 2, 3), (5, 2, 4), (6, 2, 5),
        (7, 3, 2),
    ])
    conn.commit()
    conn.close()


# (id, split, db, query, sql, input table names, reference summary)
SPEC = [
    ("fx-001", "train", "course_teach",
     "What are the names of the teachers?",
     "SELECT Name FROM teacher",
     ["teacher"],
     "There are 5 teachers in total. Their names are Kearsley Brown, "
     "Vicente Carretero, Gustaaf Deloor, Anne Walker, and Lucy Wong."),
    ("fx-002", "train", "course_teach",
     "Show names of teachers and the courses they are arranged to teach.",
     "SELECT T3.Name, T2.Course FROM course_arrange AS T1 "
     "JOIN course AS T2 ON T1.Course_ID = T2.Course_ID "
     "JOIN teacher AS T3 ON T1.Teacher_ID = T3.Teacher_ID "
     "ORDER BY T1.Course_ID, T1.Teacher_ID",
     ["course_arrange", "course", "teacher"],
     "There are 6 teaching arrangements in total. Kearsley Brown and "
     "Vicente Carretero teach Math. Gustaaf Deloor teaches Science. "
     "Anne Walker teaches History and Bible. Lucy Wong teaches Music."),
    ("fx-003", "validation", "course_teach",
     "What is the average age of the teachers?",
     "SELECT avg(Age) FROM teacher",
     ["teacher"],
     "The average age of the teachers is 31.0."),
    ("fx-004", "validation", "course_teach",
     "What are the names of teachers who teach more than one course?",
     "SELECT T2.Name FROM course_arrange AS T1 "
     "JOIN teacher AS T2 ON T1.Teacher_ID = T2.Teacher_ID "
     "GROUP BY T2.Name HAVING count(*) > 1 ORDER BY T2.Name",
     ["course_arrange", "teacher"],
     "Anne Walker is the only teacher who is arranged to teach more than "
     "one course."),
    ("fx-005", "validation", "course_teach",
     "How many courses is each teacher arranged to teach? Show the teacher "
     "names and the counts.",
     "SELECT T2.Name, count(*) FROM course_arrange AS T1 "
     "JOIN teacher AS T2 ON T1.Teacher_ID = T2.Teacher_ID "
     "GROUP BY T2.Name ORDER BY T2.Name",
     ["course_arrange", "teacher"],
     "There are 5 teachers arranged to teach courses. Anne Walker teaches 2 "
     "courses, while Gustaaf Deloor, Kearsley Brown, Lucy Wong, and Vicente "
     "Carretero each teach 1 course."),
    ("fx-006", "test", "college",
     "What is the semester in which most students registered? Show both the "
     "name and the ID.",
     "SELECT T1.semester_name, T1.semester_id FROM semesters AS T1 "
     "JOIN student_enrolment AS T2 ON T1.semester_id = T2.semester_id "
     "GROUP BY T1.semester_id ORDER BY count(*) DESC LIMIT 1",
     ["semesters", "student_enrolment"],
     "The semester in which most students registered is summer 2010. The ID "
     "of this semester is 2."),
    ("fx-007", "test", "college",
     "List all semester names.",
     "SELECT semester_name FROM semesters ORDER BY semester_id",
     ["semesters"],
     "There are 3 semesters in total. They are spring 2010, summer 2010, "
     "and fall 2010."),
    ("fx-008", "test", "college",
     "How many student enrolments are there in total?",
     "SELECT count(*) FROM student_enrolment",
     ["student_enrolment"],
     "There are 7 student enrolments in total."),
    ("fx-009", "test", "college",
     "Show the first and last names of students enrolled in the summer 2010 "
     "semester.",
     "SELECT T2.first_name, T2.last_name FROM student_enrolment AS T1 "
     "JOIN students AS T2 ON T1.student_id = T2.student_id "
     "WHERE T1.semester_id = 2 ORDER BY T2.student_id",
     ["student_enrolment", "students"],
     "There are 4 students enrolled in the summer 2010 semester. They are "
     "Emma Clarke, Olivia Reyes, Noah Fischer, and Ava Moretti."),
    ("fx-010", "test", "college",
     "Show the names of students together with the semester names in which "
     "they are enrolled.",
     "SELECT T3.first_name, T3.last_name, T1.semester_name "
     "FROM semesters AS T1 "
     "JOIN student_enrolment AS T2 ON T1.semester_id = T2.semester_id "
     "JOIN students AS T3 ON T2.student_id = T3.student_id "
     "ORDER BY T2.student_enrolment_id",
     ["semesters", "student_enrolment", "students"],
     "There are 7 enrolments of students in semesters. Emma Clarke and Liam "
     "Shah are enrolled in spring 2010. Emma Clarke, Olivia Reyes, Noah "
     "Fischer, and Ava Moretti are enrolled in summer 2010. Liam Shah is "
     "enrolled in fall 2010."),
]

# Canned model outputs per example: a single direct completion plus the
# (phase 1, phase 2) pair. A few contain deliberate factual slips so the
# scored fixture spans a range of metric values.
COMPLETIONS = {
    "fx-001": {
        "direct": "Facts: Kearsley Brown, Vicente Carretero, Gustaaf Deloor, "
                  "Anne Walker, Lucy Wong Summary: There are 5 teachers in "
                  "total. Their names are Kearsley Brown, Vicente Carretero, "
                  "Gustaaf Deloor, Anne Walker, and Lucy Wong.",
        "facts": "Facts: Kearsley Brown, Vicente Carretero, Gustaaf Deloor, "
                 "Anne Walker, Lucy Wong",
        "summary": "Summary: There are 5 teachers in total. They are Kearsley "
                   "Brown, Vicente Carretero, Gustaaf Deloor, Anne Walker, "
                   "and Lucy Wong.",
    },
    "fx-002": {
        "direct": "Facts: Kearsley Brown teaches Math, Vicente Carretero "
                  "teaches Math, Gustaaf Deloor teaches Science, Anne Walker "
                  "teaches History, Lucy Wong teaches Music Summary: There "
                  "are 5 teaching arrangements in total. Kearsley Brown and "
                  "Vicente Carretero teach Math. Gustaaf Deloor teaches "
                  "Science. Anne Walker teaches History. Lucy Wong teaches "
                  "Music.",
        "facts": "Facts: Kearsley Brown teaches Math, Vicente Carretero "
                 "teaches Math, Gustaaf Deloor teaches Science, Anne Walker "
                 "teaches History and Bible, Lucy Wong teaches Music",
        "summary": "Summary: There are 6 teaching arrangements in total. "
                   "Kearsley Brown and Vicente Carretero teach Math. Gustaaf "
                   "Deloor teaches Science. Anne Walker teaches History and "
                   "Bible. Lucy Wong teaches Music.",
    },
    "fx-003": {
        "direct": "Facts: the average age of the teachers is 31.0 Summary: "
                  "The average age of the teachers is 31.0.",
        "facts": "Facts: the average age of the teachers is 31.0",
        "summary": "Summary: The average age of the teachers is 31.0.",
    },
    "fx-004": {
        "direct": "Facts: Anne Walker teaches more than one course Summary: "
                  "Anne Walker is the teacher who teaches more than one "
                  "course.",
        "facts": "Facts: Anne Walker teaches more than one course",
        "summary": "Summary: Anne Walker is the only teacher who is arranged "
                   "to teach more than one course.",
    },
    "fx-005": {
        "direct": "Facts: Anne Walker teaches 2 courses, Gustaaf Deloor "
                  "teaches 1 course, Kearsley Brown teaches 1 course, Lucy "
                  "Wong teaches 1 course, Vicente Carretero teaches 1 course "
                  "Summary: There are 5 teachers arranged to teach courses. "
                  "Anne Walker teaches 2 courses. Gustaaf Deloor, Kearsley "
                  "Brown, Lucy Wong, and Vicente Carretero each teach 1 "
                  "course.",
        "facts": "Facts: Anne Walker teaches 2 courses, Gustaaf Deloor "
                 "teaches 1 course, Kearsley Brown teaches 1 course, Lucy "
                 "Wong teaches 1 course, Vicente Carretero teaches 1 course",
        "summary": "Summary: There are 5 teachers arranged to teach courses. "
                   "Anne Walker teaches 2 courses, while the other 4 teachers "
                   "each teach 1 course.",
    },
    "fx-006": {
        "direct": "Facts: summer 2010 is the semester in which most students "
                  "registered, its ID is 2 Summary: The semester in which "
                  "most students registered is summer 2010. The ID of this "
                  "semester is 2.",
        "facts": "Facts: summer 2010 is the semester in which most students "
                 "registered, its ID is 2",
        "summary": "Summary: The semester in which most students registered "
                   "is summer 2010. The ID of this semester is 2.",
    },
    "fx-007": {
        "direct": "Facts: spring 2010, summer 2010, fall 2010 Summary: There "
                  "are 3 semesters in total. They are spring 2010, summer "
                  "2010, and fall 2010.",
        "facts": "Facts: spring 2010, summer 2010, fall 2010",
        "summary": "Summary: There are 3 semesters. They are spring 2010, "
                   "summer 2010, and fall 2010.",
    },
    "fx-008": {
        "direct": "Facts: there are 7 student enrolments Summary: There are "
                  "7 student enrolments in total.",
        "facts": "Facts: there are 7 student enrolments",
        "summary": "Summary: There are 7 student enrolments in total.",
    },
    "fx-009": {
        "direct": "Facts: Emma Clarke, Olivia Reyes, Noah Fischer, Ava "
                  "Moretti Summary: There are 4 students enrolled in the "
                  "summer 2010 semester. They are Emma Clarke, Olivia Reyes, "
                  "Noah Fischer, and Ava Moretti.",
        "facts": "Facts: Emma Clarke, Olivia Reyes, Noah Fischer, Ava Moretti",
        "summary": "Summary: There are 4 students enrolled in summer 2010. "
                   "They are Emma Clarke, Olivia Reyes, Noah Fischer, and "
                   "Ava Moretti.",
    },
    "fx-010": {
        "direct": "Facts: Emma Clarke and Liam Shah are enrolled in spring "
                  "2010, Emma Clarke and Olivia Reyes and Noah Fischer and "
                  "Ava Moretti are enrolled in summer 2010, Liam Shah is "
                  "enrolled in fall 2010 Summary: There are 7 enrolments of "
                  "students in semesters. Emma Clarke and Liam Shah are "
                  "enrolled in spring 2010. Emma Clarke, Olivia Reyes, Noah "
                  "Fischer, and Ava Moretti are enrolled in summer 2010. "
                  "Liam Shah is enrolled in fall 2010.",
        "facts": "Facts: Emma Clarke and Liam Shah are enrolled in spring "
                 "2010, Emma Clarke and Olivia Reyes and Noah Fischer and "
                 "Ava Moretti are enrolled in summer 2010, Liam Shah is "
                 "enrolled in fall 2010",
        "summary": "Summary: There are 7 enrolments in total. Emma Clarke "
                   "and Liam Shah are enrolled in spring 2010. Emma Clarke, "
                   "Olivia Reyes, Noah Fischer, and Ava Moretti are enrolled "
                   "in summer 2010. Liam Shah is enrolled in fall 2010.",
    },
}

DIRECT_NEEDLE = "complete two tasks step by step"
PHASE1_NEEDLE = "to complete the task below. Each table"
PHASE2_NEEDLE = "generated facts from phase 1"


def build_dataset_fixture() -> list[Example]:
    db_dir = DATA / "databases"
    build_course_teach(db_dir / "course_teach" / "course_teach.sqlite")
    build_college(db_dir / "college" / "college.sqlite")
    examples = []
    handles = {}
    for ex_id, split, db, query, sql, table_names, summary in SPEC:
        if db not in handles:
            handles[db] = load_database(db_dir / db / f"{db}.sqlite")
        handle = handles[db]
        examples.append(Example(
            id=ex_id,
            query=query,
            sql=sql,
            database_id=db,
            input_tables=tuple(extract_input_tables(handle, table_names)),
            execution_table=execute_sql(handle, sql),
            summary=summary,
            split=split,
        ))
    for handle in handles.values():
        handle.close()
    return examples


def build_mock_rules(examples: list[Example]) -> list[list]:
    rules = []
    for ex in examples:
        anchor = f"provided below:\n\nQuery: {ex.query}\n"
        canned = COMPLETIONS[ex.id]
        rules.append([[anchor, DIRECT_NEEDLE], canned["direct"]])
        rules.append([[anchor, PHASE1_NEEDLE], canned["facts"]])
        rules.append([[anchor, PHASE2_NEEDLE], canned["summary"]])
    return rules


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    golden = DATA / "golden"
    golden.mkdir(exist_ok=True)

    examples = build_dataset_fixture()
    write_jsonl(examples, DATA / "fixture_dataset.jsonl")
    print(f"wrote {DATA / 'fixture_dataset.jsonl'} ({len(examples)} examples)")

    rules = build_mock_rules(examples)
    (DATA / "mock_completions.json").write_text(
        json.dumps({"rules": rules}, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8")
    print(f"wrote {DATA / 'mock_completions.json'}")

    # Prompt goldens, frozen from the builders on the teacher example.
    fx2 = examples[1]
    (golden / "prompt_direct.txt").write_text(
        build_direct_prompt(fx2.query, fx2.input_tables).text, encoding="utf-8")
    (golden / "prompt_phase1.txt").write_text(
        build_reason_prompt(fx2.query, fx2.input_tables).text, encoding="utf-8")
    facts = ["Kearsley Brown teaches Math", "Vicente Carretero teaches Math",
             "Gustaaf Deloor teaches Science",
             "Anne Walker teaches History and Bible", "Lucy Wong teaches Music"]
    (golden / "prompt_phase2.txt").write_text(
        build_summarize_prompt(fx2.query, facts).text, encoding="utf-8")
    fx6 = examples[5]
    (golden / "prompt_annotation.txt").write_text(
        build_annotation_prompt(fx6.query, fx6.execution_table,
                                BuildConfig()).text, encoding="utf-8")
    print(f"wrote prompt goldens under {golden}")

    # End-to-end golden: mock direct run over the full fixture, scored.
    gateway = MockGateway(rules=[(tuple(needles), response)
                                 for needles, response in rules])
    records = run_batch(examples, gateway, "direct", max_workers=4)
    from mtsumm.controller import write_predictions
    write_predictions(records, DATA / "golden" / "predictions_direct.jsonl")
    report = evaluate_run(records, examples)
    text, machine = render_report(report)
    (golden / "report_direct.json").write_text(machine, encoding="utf-8")
    (golden / "report_direct.txt").write_text(text, encoding="utf-8")
    print(f"wrote e2e goldens; corpus BLEU {report.bleu:.2f}, "
          f"ROUGE-L {report.rouge_l_f1:.4f}, STR-EM {report.str_em:.4f}, "
          f"PARENT {report.parent_f:.4f}, completeness {report.completeness:.4f}, "
          f"failed {report.n_failed}")


if __name__ == "__main__":
    main()
