"""Automated scoring: ROUGE-L, corpus BLEU, STR-EM, and the table-grounded
entailment metric (PARENT-style precision/recall over n-grams).

All metrics share one tokenizer so lexical comparisons are consistent across
the suite. Everything here is a pure function.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .model import Table
from .tokens import tokenize

__all__ = [
    "tokenize",
    "RougeScore",
    "ParentScore",
    "BleuStats",
    "rouge_l",
    "corpus_bleu",
    "bleu_stats",
    "bleu_from_stats",
    "str_em",
    "parent",
]

logger = logging.getLogger(__name__)

MAX_ORDER = 4
_GEOMEAN_EPS = 1e-12  # zero orders contribute this before a geometric mean


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ParentScore:
    entailed_precision: float
    entailed_recall: float
    f_score: float
    lambda_weight: float


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    # Rolling one-row DP keeps memory linear in len(b).
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(prediction: str, reference: str) -> RougeScore:
    """Longest-common-subsequence precision/recall/F1 over tokens."""
    pred = tokenize(prediction)
    ref = tokenize(reference)
    if not pred and not ref:
        return RougeScore(0.0, 0.0, 0.0)
    lcs = _lcs_length(pred, ref)
    p = lcs / len(pred) if pred else 0.0
    r = lcs / len(ref) if ref else 0.0
    return RougeScore(p, r, _f1(p, r))


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


@dataclass(frozen=True)
class BleuStats:
    """Sufficient statistics for corpus BLEU; additive across partitions."""

    correct: tuple[int, ...]
    total: tuple[int, ...]
    pred_len: int
    ref_len: int

    @classmethod
    def zero(cls) -> "BleuStats":
        return cls((0,) * MAX_ORDER, (0,) * MAX_ORDER, 0, 0)

    def __add__(self, other: "BleuStats") -> "BleuStats":
        return BleuStats(
            tuple(a + b for a, b in zip(self.correct, other.correct)),
            tuple(a + b for a, b in zip(self.total, other.total)),
            self.pred_len + other.pred_len,
            self.ref_len + other.ref_len,
        )

    def to_dict(self) -> dict:
        return {"correct": list(self.correct), "total": list(self.total),
                "pred_len": self.pred_len, "ref_len": self.ref_len}

    @classmethod
    def from_dict(cls, d: dict) -> "BleuStats":
        return cls(tuple(d["correct"]), tuple(d["total"]),
                   d["pred_len"], d["ref_len"])


def bleu_stats(prediction: str, reference: str) -> BleuStats:
    """Clipped n-gram match counts and lengths for one pred/ref pair."""
    pred = tokenize(prediction)
    ref = tokenize(reference)
    correct = []
    total = []
    for n in range(1, MAX_ORDER + 1):
        pred_ngrams = _ngram_counts(pred, n)
        ref_ngrams = _ngram_counts(ref, n)
        total.append(max(len(pred) - n + 1, 0))
        correct.append(sum(min(count, ref_ngrams[g])
                           for g, count in pred_ngrams.items()))
    return BleuStats(tuple(correct), tuple(total), len(pred), len(ref))


def corpus_bleu(predictions: Sequence[str], references: Sequence[str]) -> float:
    """Corpus-level BLEU-4 on the shared tokenization, scaled to [0, 100].

    Modified n-gram precisions are pooled over the whole corpus; the score is
    their geometric mean times the brevity penalty. Orders with zero matches
    are exponentially smoothed (each successive zero halves the credit), but
    a corpus with no unigram matches at all scores exactly 0.
    """
    if len(predictions) != len(references):
        raise ValueError(
            f"prediction/reference length mismatch: {len(predictions)} vs {len(references)}"
        )
    stats = BleuStats.zero()
    for pred_text, ref_text in zip(predictions, references):
        stats = stats + bleu_stats(pred_text, ref_text)
    return bleu_from_stats(stats)


def bleu_from_stats(stats: BleuStats) -> float:
    """BLEU from pooled sufficient statistics."""
    if stats.pred_len == 0 or stats.total[0] == 0 or stats.correct[0] == 0:
        return 0.0
    log_sum = 0.0
    orders = 0
    smooth = 1.0
    for n in range(MAX_ORDER):
        if stats.total[n] == 0:
            continue  # corpus too short for this order
        if stats.correct[n] > 0:
            precision = stats.correct[n] / stats.total[n]
        else:
            smooth *= 2.0
            precision = 1.0 / (smooth * stats.total[n])
        log_sum += math.log(precision)
        orders += 1
    geo_mean = math.exp(log_sum / orders)
    bp = (1.0 if stats.pred_len >= stats.ref_len
          else math.exp(1.0 - stats.ref_len / stats.pred_len))
    return 100.0 * bp * geo_mean


def _distinct_cell_token_seqs(table: Table) -> list[tuple[str, ...]]:
    seen = []
    for cell in table.cell_values():
        toks = tuple(tokenize(cell))
        if toks and toks not in seen:
            seen.append(toks)
    return seen


def _contains_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    n = len(needle)
    return any(tuple(haystack[i:i + n]) == tuple(needle)
               for i in range(len(haystack) - n + 1))


def str_em(prediction: str, execution_table: Table) -> float:
    """Fraction of the table's distinct cell values that occur verbatim (as
    contiguous token subsequences) in the prediction."""
    cells = _distinct_cell_token_seqs(execution_table)
    if not cells:
        logger.warning("str_em: execution table %r has no cell values; scoring 1.0",
                       execution_table.name)
        return 1.0
    pred = tokenize(prediction)
    hits = sum(1 for c in cells if _contains_subsequence(pred, c))
    return hits / len(cells)


def _geomean(values: Sequence[float]) -> float:
    clipped = [max(v, _GEOMEAN_EPS) for v in values]
    return math.exp(sum(math.log(v) for v in clipped) / len(clipped))


def parent(prediction: str, reference: str, execution_table: Table,
           lambda_weight: float = 0.5) -> ParentScore:
    """Entailed n-gram precision/recall grounded in the execution table.

    An n-gram's entailment probability w(g) is the fraction of its tokens
    present in the table's cell tokens. Precision credits predicted n-grams
    found in the reference, plus w(g) credit for the rest; recall blends
    reference recall (weighted by w) with table recall (per-cell LCS
    coverage) as ref_recall**lambda * table_recall**(1 - lambda).
    """
    if not 0.0 <= lambda_weight <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lambda_weight}")
    pred = tokenize(prediction)
    ref = tokenize(reference)
    cells = [tuple(tokenize(c)) for c in execution_table.cell_values()]
    cells = [c for c in cells if c]
    table_tokens = {tok for c in cells for tok in c}

    def w(gram: tuple[str, ...]) -> float:
        return sum(1 for tok in gram if tok in table_tokens) / len(gram)

    precisions = []
    ref_recalls = []
    for n in range(1, MAX_ORDER + 1):
        pred_ngrams = _ngram_counts(pred, n)
        ref_ngrams = _ngram_counts(ref, n)
        # Entailed precision: matched-in-reference share plus w(g) for the rest.
        denom = sum(pred_ngrams.values())
        if denom > 0:
            num = 0.0
            for g, c_pred in pred_ngrams.items():
                matched = min(ref_ngrams[g], c_pred)
                num += matched + (c_pred - matched) * w(g)
            precisions.append(num / denom)
        # Entailed reference recall; orders where no reference n-gram is
        # table-entailed are skipped.
        rec_denom = sum(c_ref * w(g) for g, c_ref in ref_ngrams.items())
        if rec_denom > 0:
            rec_num = sum(min(pred_ngrams[g], c_ref) * w(g)
                          for g, c_ref in ref_ngrams.items())
            ref_recalls.append(rec_num / rec_denom)

    e_p = _geomean(precisions) if precisions else 0.0
    if cells:
        table_recall = sum(_lcs_length(c, pred) / len(c) for c in cells) / len(cells)
    else:
        table_recall = 1.0  # nothing to recall from an empty table
    ref_recall = _geomean(ref_recalls) if ref_recalls else table_recall
    e_r = (ref_recall ** lambda_weight) * (table_recall ** (1.0 - lambda_weight))
    return ParentScore(e_p, e_r, _f1(e_p, e_r), lambda_weight)
