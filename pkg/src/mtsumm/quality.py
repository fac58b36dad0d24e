"""Dataset quality verification: automated completeness plus human-label
aggregation and chance-corrected inter-annotator agreement."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .metrics import rouge_l
from .model import Table


@dataclass(frozen=True)
class HumanLabel:
    """One annotator's judgment of one summary."""

    example_id: str
    annotator_id: str
    faithfulness: int  # 0 or 1
    fluency: int  # 1..5
    corrected_summary: str | None = None
    timestamp: str = ""

    def violations(self) -> list[str]:
        out = []
        if self.faithfulness not in (0, 1):
            out.append(f"faithfulness must be 0 or 1, got {self.faithfulness}")
        if not (isinstance(self.fluency, int) and 1 <= self.fluency <= 5):
            out.append(f"fluency must be an integer in 1..5, got {self.fluency}")
        return out

    def to_dict(self) -> dict:
        out = {
            "example_id": self.example_id,
            "annotator_id": self.annotator_id,
            "faithfulness": self.faithfulness,
            "fluency": self.fluency,
            "timestamp": self.timestamp,
        }
        if self.corrected_summary is not None:
            out["corrected_summary"] = self.corrected_summary
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "HumanLabel":
        return cls(
            example_id=d["example_id"],
            annotator_id=d["annotator_id"],
            faithfulness=d["faithfulness"],
            fluency=d["fluency"],
            corrected_summary=d.get("corrected_summary"),
            timestamp=d.get("timestamp", ""),
        )


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    mean_observed_agreement: float
    expected_agreement: float
    n_items: int
    n_raters: int


@dataclass(frozen=True)
class LabelSummary:
    per_example_faithfulness: tuple[tuple[str, float], ...]
    per_example_fluency: tuple[tuple[str, float], ...]
    corpus_faithfulness: float
    corpus_fluency: float


def build_reference_sequence(query: str, execution_table: Table) -> str:
    """Query text followed by every execution-table cell, row-major, all
    joined with ", "."""
    cells = execution_table.cell_values()
    return ", ".join([query] + cells) if cells else query


def completeness(summary: str, query: str, execution_table: Table) -> float:
    """ROUGE-L recall of the summary against the query + cells sequence."""
    return rouge_l(summary, build_reference_sequence(query, execution_table)).recall


def fleiss_kappa(ratings: Sequence[Sequence[Hashable]]) -> AgreementReport:
    """Fleiss' kappa over an item x rater matrix of category labels.

    Every item must carry the same number of ratings (>= 2). Unanimous
    agreement on a single category yields kappa = 1.0 by convention (the
    chance-agreement denominator vanishes there).
    """
    if not ratings:
        raise ValueError("no items to rate")
    n_raters = len(ratings[0])
    if any(len(row) != n_raters for row in ratings):
        raise ValueError("ragged ratings matrix: every item needs the same rater count")
    if n_raters < 2:
        raise ValueError(f"need at least 2 raters, got {n_raters}")

    n_items = len(ratings)
    category_totals: Counter = Counter()
    observed = 0.0
    for row in ratings:
        counts = Counter(row)
        category_totals.update(counts)
        observed += sum(c * c for c in counts.values()) - n_raters
    p_bar = observed / (n_items * n_raters * (n_raters - 1))
    total = n_items * n_raters
    p_e = sum((c / total) ** 2 for c in category_totals.values())
    kappa = 1.0 if p_e >= 1.0 else (p_bar - p_e) / (1.0 - p_e)
    return AgreementReport(kappa, p_bar, p_e, n_items, n_raters)


def write_labels_jsonl(labels: Iterable[HumanLabel], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            fh.write(json.dumps(label.to_dict(), ensure_ascii=False) + "\n")


def read_labels_jsonl(path) -> list[HumanLabel]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(HumanLabel.from_dict(json.loads(line)))
    return out


def aggregate_labels(labels: Sequence[HumanLabel]) -> LabelSummary:
    """Per-example mean faithfulness/fluency, plus corpus means over examples."""
    by_example: dict[str, list[HumanLabel]] = defaultdict(list)
    for lab in labels:
        by_example[lab.example_id].append(lab)
    faith = []
    flu = []
    for ex_id in sorted(by_example):
        group = by_example[ex_id]
        faith.append((ex_id, sum(l.faithfulness for l in group) / len(group)))
        flu.append((ex_id, sum(l.fluency for l in group) / len(group)))
    n = len(faith)
    return LabelSummary(
        per_example_faithfulness=tuple(faith),
        per_example_fluency=tuple(flu),
        corpus_faithfulness=sum(v for _, v in faith) / n if n else 0.0,
        corpus_fluency=sum(v for _, v in flu) / n if n else 0.0,
    )
