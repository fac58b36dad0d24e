"""Run-level evaluation: score a prediction file against a dataset and
produce per-example scores, corpus means, and the single/multi-table
breakdown.

BLEU is a corpus-pooled statistic, not a mean, so each report carries its
pooled n-gram statistics; breakdown statistics sum to the corpus statistics,
which is what makes recombination exact. Every other metric recombines as a
count-weighted mean.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .controller import PredictionRecord
from .metrics import (BleuStats, ParentScore, RougeScore, bleu_from_stats,
                      bleu_stats, parent, rouge_l, str_em)
from .model import Example
from .quality import completeness


@dataclass(frozen=True)
class ExampleScore:
    id: str
    n_tables: int
    failed: bool
    rouge: RougeScore
    str_em: float
    parent: ParentScore
    completeness: float
    bleu: BleuStats
    bertscore: float | None = None

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "n_tables": self.n_tables,
            "failed": self.failed,
            "rouge_l": {"precision": self.rouge.precision,
                        "recall": self.rouge.recall, "f1": self.rouge.f1},
            "str_em": self.str_em,
            "parent": {"entailed_precision": self.parent.entailed_precision,
                       "entailed_recall": self.parent.entailed_recall,
                       "f_score": self.parent.f_score,
                       "lambda": self.parent.lambda_weight},
            "completeness": self.completeness,
            "bleu_stats": self.bleu.to_dict(),
        }
        if self.bertscore is not None:
            out["bertscore"] = self.bertscore
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ExampleScore":
        return cls(
            id=d["id"],
            n_tables=d["n_tables"],
            failed=d["failed"],
            rouge=RougeScore(d["rouge_l"]["precision"], d["rouge_l"]["recall"],
                             d["rouge_l"]["f1"]),
            str_em=d["str_em"],
            parent=ParentScore(d["parent"]["entailed_precision"],
                               d["parent"]["entailed_recall"],
                               d["parent"]["f_score"], d["parent"]["lambda"]),
            completeness=d["completeness"],
            bleu=BleuStats.from_dict(d["bleu_stats"]),
            bertscore=d.get("bertscore"),
        )


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


@dataclass(frozen=True)
class ScoreReport:
    examples: tuple[ExampleScore, ...]
    bleu: float
    rouge_l_f1: float
    str_em: float
    parent_f: float
    completeness: float
    bleu_stats: BleuStats
    n_failed: int
    bertscore: float | None = None
    bertscore_n: int = 0
    breakdown: tuple[tuple[str, "ScoreReport"], ...] = ()

    @property
    def n_examples(self) -> int:
        return len(self.examples)

    def breakdown_report(self, key: str) -> "ScoreReport":
        for name, sub in self.breakdown:
            if name == key:
                return sub
        raise KeyError(key)

    def to_dict(self) -> dict:
        out = {
            "n_examples": self.n_examples,
            "n_failed": self.n_failed,
            "corpus": {
                "bleu": self.bleu,
                "rouge_l_f1": self.rouge_l_f1,
                "str_em": self.str_em,
                "parent_f": self.parent_f,
                "completeness": self.completeness,
            },
            "bleu_stats": self.bleu_stats.to_dict(),
            "examples": [s.to_dict() for s in self.examples],
        }
        if self.bertscore_n:
            out["corpus"]["bertscore"] = self.bertscore
            out["bertscore_n"] = self.bertscore_n
        if self.breakdown:
            out["breakdown"] = {name: sub.to_dict() for name, sub in self.breakdown}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreReport":
        breakdown = tuple(
            (name, cls.from_dict(sub))
            for name, sub in sorted(d.get("breakdown", {}).items())
        )
        return cls(
            examples=tuple(ExampleScore.from_dict(s) for s in d["examples"]),
            bleu=d["corpus"]["bleu"],
            rouge_l_f1=d["corpus"]["rouge_l_f1"],
            str_em=d["corpus"]["str_em"],
            parent_f=d["corpus"]["parent_f"],
            completeness=d["corpus"]["completeness"],
            bleu_stats=BleuStats.from_dict(d["bleu_stats"]),
            n_failed=d["n_failed"],
            bertscore=d["corpus"].get("bertscore"),
            bertscore_n=d.get("bertscore_n", 0),
            breakdown=breakdown,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ScoreReport":
        return cls.from_dict(json.loads(text))


def _report_from_scores(scores: Sequence[ExampleScore],
                        with_breakdown: bool) -> ScoreReport:
    ordered = tuple(sorted(scores, key=lambda s: s.id))
    stats = BleuStats.zero()
    for s in ordered:
        stats = stats + s.bleu
    berts = [s.bertscore for s in ordered if s.bertscore is not None]
    breakdown: tuple[tuple[str, ScoreReport], ...] = ()
    if with_breakdown:
        single = [s for s in ordered if s.n_tables == 1]
        multi = [s for s in ordered if s.n_tables >= 2]
        breakdown = (
            ("multi_table", _report_from_scores(multi, False)),
            ("single_table", _report_from_scores(single, False)),
        )
    return ScoreReport(
        examples=ordered,
        bleu=bleu_from_stats(stats),
        rouge_l_f1=_mean([s.rouge.f1 for s in ordered]),
        str_em=_mean([s.str_em for s in ordered]),
        parent_f=_mean([s.parent.f_score for s in ordered]),
        completeness=_mean([s.completeness for s in ordered]),
        bleu_stats=stats,
        n_failed=sum(1 for s in ordered if s.failed),
        bertscore=_mean(berts) if berts else None,
        bertscore_n=len(berts),
        breakdown=breakdown,
    )


def evaluate_run(predictions: Sequence[PredictionRecord],
                 dataset: Sequence[Example],
                 lambda_weight: float = 0.5,
                 bertscores: Mapping[str, float] | None = None,
                 max_workers: int = 1) -> ScoreReport:
    """Score predictions against their dataset examples.

    Every prediction id must exist in the dataset; failed predictions are
    scored as empty strings and counted. ``bertscores`` is an optional
    externally computed id -> value sidecar (this package never runs a
    neural scorer itself).
    """
    by_id = {ex.id: ex for ex in dataset}
    unknown = sorted({p.id for p in predictions} - set(by_id))
    if unknown:
        raise ValueError(f"unknown example id(s): {', '.join(unknown)}")
    seen: set[str] = set()
    duplicates: set[str] = set()
    for p in predictions:
        (duplicates if p.id in seen else seen).add(p.id)
    if duplicates:
        raise ValueError(f"duplicate prediction id(s): {', '.join(sorted(duplicates))}")

    def score_one(pred: PredictionRecord) -> ExampleScore:
        ex = by_id[pred.id]
        failed = pred.error is not None
        text = "" if failed else pred.summary
        return ExampleScore(
            id=pred.id,
            n_tables=len(ex.input_tables),
            failed=failed,
            rouge=rouge_l(text, ex.summary),
            str_em=str_em(text, ex.execution_table),
            parent=parent(text, ex.summary, ex.execution_table, lambda_weight),
            completeness=completeness(text, ex.query, ex.execution_table),
            bleu=bleu_stats(text, ex.summary),
            bertscore=(bertscores or {}).get(pred.id),
        )

    if max_workers > 1 and len(predictions) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            scores = list(pool.map(score_one, predictions))
    else:
        scores = [score_one(p) for p in predictions]
    return _report_from_scores(scores, with_breakdown=True)


def render_report(report: ScoreReport) -> tuple[str, str]:
    """Render as (fixed-width text table, machine JSON)."""
    has_bert = report.bertscore_n > 0
    headers = ["scope", "n", "SacreBLEU", "ROUGE-L"]
    if has_bert:
        headers.append("BERTScore")
    headers += ["STR-EM", "PARENT", "Completeness"]

    def row(name: str, rep: ScoreReport) -> list[str]:
        cells = [name, str(rep.n_examples), f"{rep.bleu:.2f}",
                 f"{rep.rouge_l_f1:.4f}"]
        if has_bert:
            cells.append("-" if rep.bertscore is None else f"{rep.bertscore:.4f}")
        cells += [f"{rep.str_em:.4f}", f"{rep.parent_f:.4f}",
                  f"{rep.completeness:.4f}"]
        return cells

    rows = []
    if report.n_examples:
        rows.append(row("overall", report))
        for name, sub in report.breakdown:
            rows.append(row(name, sub))
    if not rows:
        return "  ".join(headers) + "\n", report.to_json()
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows))
              for i in range(len(headers))]
    lines = [
        "  ".join(h.ljust(widths[i]) if i == 0 else h.rjust(widths[i])
                  for i, h in enumerate(headers))
    ]
    for r in rows:
        lines.append("  ".join(c.ljust(widths[i]) if i == 0 else c.rjust(widths[i])
                               for i, c in enumerate(r)))
    return "\n".join(lines) + "\n", report.to_json()


def verify_corpus(examples: Sequence[Example]) -> dict:
    """Mean completeness of annotated summaries, overall and per split."""
    from .model import SPLITS

    def mean_for(subset: Sequence[Example]) -> float:
        return _mean([completeness(ex.summary, ex.query, ex.execution_table)
                      for ex in subset])

    out = {"overall": mean_for(examples), "n_examples": len(examples)}
    for split_name in SPLITS:
        subset = [ex for ex in examples if ex.split == split_name]
        if subset:
            out[split_name] = mean_for(subset)
    return out
