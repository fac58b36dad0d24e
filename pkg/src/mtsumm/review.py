"""HTTP backend for human quality verification and post-correction.

A single-file SQLite store holds labels (overwrite-by-key) and corrections
(append-only, latest wins at export). Review pools are a seeded sample of up
to 100 examples per split; a task is handed to an annotator only if they
have not labeled it yet. Corrections are accepted for validation and test
examples only. The JSON field names are stable and shared with the browser
UI, which talks to nothing but these endpoints.
"""

from __future__ import annotations

import json
import logging
import random
import sqlite3
import threading
from pathlib import Path
from typing import Sequence

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .model import SPLITS, Example, read_jsonl
from .quality import AgreementReport, HumanLabel, fleiss_kappa

logger = logging.getLogger(__name__)

POOL_SIZE = 100

_SCHEMA = """
CREATE TABLE IF NOT EXISTS labels (
    example_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    faithfulness INTEGER NOT NULL,
    fluency INTEGER NOT NULL,
    corrected_summary TEXT,
    timestamp TEXT NOT NULL DEFAULT '',
    PRIMARY KEY (example_id, annotator_id)
);
CREATE TABLE IF NOT EXISTS corrections (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    example_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    corrected_summary TEXT NOT NULL,
    timestamp TEXT NOT NULL DEFAULT ''
);
"""

CORRECTABLE_SPLITS = ("validation", "test")


class InsufficientRatersError(ValueError):
    pass


class ReviewStore:
    """Dataset plus persistent labels/corrections. Writes are serialized."""

    def __init__(self, dataset: Sequence[Example], db_path, seed: int = 0,
                 pool_size: int = POOL_SIZE):
        self.examples = {ex.id: ex for ex in dataset}
        if len(self.examples) != len(dataset):
            raise ValueError("dataset contains duplicate example ids")
        self._order = [ex.id for ex in dataset]
        self.seed = seed
        self.pools = self._build_pools(dataset, seed, pool_size)
        self._conn = sqlite3.connect(str(db_path), check_same_thread=False)
        self._conn.executescript(_SCHEMA)
        self._conn.commit()
        self._lock = threading.Lock()

    @staticmethod
    def _build_pools(dataset: Sequence[Example], seed: int,
                     pool_size: int) -> dict[str, list[str]]:
        rng = random.Random(seed)
        pools: dict[str, list[str]] = {}
        for split in SPLITS:
            ids = [ex.id for ex in dataset if ex.split == split]
            pools[split] = rng.sample(ids, min(pool_size, len(ids)))
        return pools

    def close(self) -> None:
        self._conn.close()

    # -- labels ---------------------------------------------------------

    def submit_label(self, label: HumanLabel) -> None:
        violations = label.violations()
        if violations:
            raise ValueError("; ".join(violations))
        if label.example_id not in self.examples:
            raise KeyError(label.example_id)
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO labels "
                "(example_id, annotator_id, faithfulness, fluency,"
                " corrected_summary, timestamp) VALUES (?, ?, ?, ?, ?, ?)",
                (label.example_id, label.annotator_id, label.faithfulness,
                 label.fluency, label.corrected_summary, label.timestamp),
            )
            self._conn.commit()

    def labels(self, example_id: str | None = None) -> list[HumanLabel]:
        query = ("SELECT example_id, annotator_id, faithfulness, fluency,"
                 " corrected_summary, timestamp FROM labels")
        args: tuple = ()
        if example_id is not None:
            query += " WHERE example_id = ?"
            args = (example_id,)
        rows = self._conn.execute(query + " ORDER BY example_id, annotator_id",
                                  args).fetchall()
        return [HumanLabel(r[0], r[1], r[2], r[3], r[4], r[5]) for r in rows]

    def label_count(self, example_id: str) -> int:
        row = self._conn.execute(
            "SELECT COUNT(*) FROM labels WHERE example_id = ?",
            (example_id,)).fetchone()
        return row[0]

    def labeled_by(self, annotator_id: str) -> set[str]:
        rows = self._conn.execute(
            "SELECT example_id FROM labels WHERE annotator_id = ?",
            (annotator_id,)).fetchall()
        return {r[0] for r in rows}

    # -- tasks ----------------------------------------------------------

    def next_task(self, annotator_id: str, split: str) -> Example | None:
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        done = self.labeled_by(annotator_id)
        for example_id in self.pools[split]:
            if example_id not in done:
                return self.examples[example_id]
        return None

    # -- corrections ----------------------------------------------------

    def submit_correction(self, example_id: str, corrected_summary: str,
                          annotator_id: str, timestamp: str = "") -> None:
        example = self.examples.get(example_id)
        if example is None:
            raise KeyError(example_id)
        if example.split not in CORRECTABLE_SPLITS:
            raise ValueError(
                f"corrections are limited to validation and test splits; "
                f"example {example_id} is in split {example.split!r}")
        if not corrected_summary.strip():
            raise ValueError("corrected_summary must be non-empty")
        with self._lock:
            self._conn.execute(
                "INSERT INTO corrections "
                "(example_id, annotator_id, corrected_summary, timestamp) "
                "VALUES (?, ?, ?, ?)",
                (example_id, annotator_id, corrected_summary, timestamp),
            )
            self._conn.commit()

    def latest_corrections(self) -> dict[str, str]:
        rows = self._conn.execute(
            "SELECT example_id, corrected_summary FROM corrections ORDER BY seq"
        ).fetchall()
        return {r[0]: r[1] for r in rows}

    # -- reporting ------------------------------------------------------

    def agreement(self, split: str, aspect: str) -> AgreementReport:
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        if aspect not in ("faithfulness", "fluency"):
            raise ValueError(f"unknown aspect {aspect!r}")
        by_example: dict[str, list[HumanLabel]] = {}
        for label in self.labels():
            example = self.examples.get(label.example_id)
            if example is not None and example.split == split:
                by_example.setdefault(label.example_id, []).append(label)
        rated = {ex_id: labs for ex_id, labs in by_example.items() if len(labs) >= 2}
        if not rated:
            raise InsufficientRatersError(
                f"no example in split {split!r} has two or more labels")
        # Fleiss needs a rectangular matrix; items keep their first
        # min-rater-count labels in annotator order, which is deterministic.
        n_raters = min(len(labs) for labs in rated.values())
        matrix = []
        for ex_id in sorted(rated):
            ordered = sorted(rated[ex_id], key=lambda l: l.annotator_id)[:n_raters]
            matrix.append([getattr(label, aspect) for label in ordered])
        return fleiss_kappa(matrix)

    def export(self, split: str | None = None) -> str:
        corrections = self.latest_corrections()
        lines = []
        for example_id in self._order:
            example = self.examples[example_id]
            if split is not None and example.split != split:
                continue
            if example_id in corrections and example.split in CORRECTABLE_SPLITS:
                example = example.with_summary(corrections[example_id])
            lines.append(json.dumps(example.to_dict(), ensure_ascii=False))
        return "\n".join(lines) + ("\n" if lines else "")


def _task_payload(store: ReviewStore, example: Example) -> dict:
    return {
        "example_id": example.id,
        "split": example.split,
        "query": example.query,
        "input_tables": [t.to_dict() for t in example.input_tables],
        "execution_table": example.execution_table.to_dict(),
        "candidate_summary": example.summary,
        "n_labels": store.label_count(example.id),
    }


def create_app(dataset: Sequence[Example] | str | Path, db_path,
               seed: int = 0, pool_size: int = POOL_SIZE,
               static_dir: str | Path | None = None) -> FastAPI:
    if isinstance(dataset, (str, Path)):
        dataset = read_jsonl(dataset)
    store = ReviewStore(dataset, db_path, seed=seed, pool_size=pool_size)
    app = FastAPI(title="summary review service")
    app.state.store = store

    @app.get("/tasks/next")
    def tasks_next(annotator: str, split: str):
        try:
            example = store.next_task(annotator, split)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if example is None:
            return None
        return _task_payload(store, example)

    @app.get("/examples/{example_id}")
    def get_example(example_id: str):
        example = store.examples.get(example_id)
        if example is None:
            raise HTTPException(status_code=404, detail=f"unknown example {example_id}")
        return _task_payload(store, example)

    @app.post("/labels")
    def post_label(payload: dict = Body(...)):
        for field in ("example_id", "annotator_id", "faithfulness", "fluency"):
            if field not in payload:
                raise HTTPException(status_code=422, detail=f"missing field {field!r}")
        label = HumanLabel(
            example_id=payload["example_id"],
            annotator_id=payload["annotator_id"],
            faithfulness=payload["faithfulness"],
            fluency=payload["fluency"],
            corrected_summary=payload.get("corrected_summary"),
            timestamp=payload.get("timestamp", ""),
        )
        try:
            store.submit_label(label)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown example {label.example_id}")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"status": "stored", "example_id": label.example_id,
                "annotator_id": label.annotator_id}

    @app.post("/corrections")
    def post_correction(payload: dict = Body(...)):
        for field in ("example_id", "annotator_id", "corrected_summary"):
            if field not in payload:
                raise HTTPException(status_code=422, detail=f"missing field {field!r}")
        try:
            store.submit_correction(payload["example_id"],
                                    payload["corrected_summary"],
                                    payload["annotator_id"],
                                    payload.get("timestamp", ""))
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown example {payload['example_id']}")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"status": "stored", "example_id": payload["example_id"]}

    @app.get("/agreement")
    def get_agreement(split: str, aspect: str):
        try:
            report = store.agreement(split, aspect)
        except InsufficientRatersError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "kappa": report.kappa,
            "mean_observed_agreement": report.mean_observed_agreement,
            "expected_agreement": report.expected_agreement,
            "n_items": report.n_items,
            "n_raters": report.n_raters,
            "split": split,
            "aspect": aspect,
        }

    @app.get("/export")
    def get_export(split: str | None = None):
        if split is not None and split not in SPLITS:
            raise HTTPException(status_code=422, detail=f"unknown split {split!r}")
        return PlainTextResponse(store.export(split),
                                 media_type="application/x-ndjson")

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")

    return app
