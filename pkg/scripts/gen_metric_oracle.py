#!/usr/bin/env python3
"""Generate the 50-pair metric fixture and its frozen oracle values.

The oracle implementations below are written independently of the package:
ROUGE-L uses a memoized recursive LCS, BLEU transcribes the reference
corpus-BLEU statistic computation (pooled counts, NIST exponential
smoothing, effective order, brevity penalty), and the table-grounded
entailment metric follows the published word-overlap formulation. They share
only the tokenization rule, which the comparison demands.

Run once from the repository root:

    python3 scripts/gen_metric_oracle.py

It writes tests/data/metric_fixture.json and tests/data/metric_expected.json.
Both files are committed; the test suite never re-runs this script.
"""

from __future__ import annotations

import json
import math
import random
import re
import sys
from collections import Counter
from functools import lru_cache
from pathlib import Path

MAX_ORDER = 4

# Same normalization contract as the package tokenizer, restated here on
# purpose: the oracle must see identical token streams.
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tok(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


# --- ROUGE-L oracle (memoized recursion) -------------------------------------

def rouge_l_oracle(prediction: str, reference: str) -> dict:
    pred = tuple(tok(prediction))
    ref = tuple(tok(reference))

    @lru_cache(maxsize=None)
    def lcs(i: int, j: int) -> int:
        if i == 0 or j == 0:
            return 0
        if pred[i - 1] == ref[j - 1]:
            return lcs(i - 1, j - 1) + 1
        return max(lcs(i - 1, j), lcs(i, j - 1))

    sys.setrecursionlimit(10000)
    length = lcs(len(pred), len(ref))
    p = length / len(pred) if pred else 0.0
    r = length / len(ref) if ref else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return {"precision": p, "recall": r, "f1": f}


# --- corpus BLEU oracle (reference statistic computation) ---------------------

def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_oracle(predictions: list[str], references: list[str]) -> float:
    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    sys_len = 0
    ref_len = 0
    for hyp_text, ref_text in zip(predictions, references):
        hyp = tok(hyp_text)
        ref = tok(ref_text)
        sys_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp, n)
            ref_counts = _ngrams(ref, n)
            total[n - 1] += max(len(hyp) - n + 1, 0)
            for gram, count in hyp_counts.items():
                correct[n - 1] += min(count, ref_counts.get(gram, 0))

    precisions = [0.0] * MAX_ORDER
    smooth_mteval = 1.0
    effective_order = MAX_ORDER
    for n in range(1, MAX_ORDER + 1):
        if total[n - 1] == 0:
            break
        effective_order = n
        if correct[n - 1] == 0:
            smooth_mteval *= 2
            precisions[n - 1] = 100.0 / (smooth_mteval * total[n - 1])
        else:
            precisions[n - 1] = 100.0 * correct[n - 1] / total[n - 1]

    def safe_log(value: float) -> float:
        return math.log(value) if value > 0.0 else -9999999999.0

    brevity_penalty = 1.0
    if sys_len < ref_len:
        brevity_penalty = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0
    log_sum = sum(safe_log(p) for p in precisions[:effective_order])
    return brevity_penalty * math.exp(log_sum / effective_order)


# --- table-grounded entailment oracle (word-overlap formulation) --------------

def parent_oracle(prediction: str, reference: str, cells: list[str],
                  lambda_weight: float = 0.5) -> dict:
    pred = tok(prediction)
    ref = tok(reference)
    cell_tokens = [tok(c) for c in cells if tok(c)]
    table_tokens = set()
    for value in cell_tokens:
        table_tokens.update(value)

    def entail(gram: tuple[str, ...]) -> float:
        return sum(1.0 for t in gram if t in table_tokens) / len(gram)

    def mention(value: list[str], sentence: list[str]) -> float:
        rows = len(value)
        cols = len(sentence)
        table = [[0] * (cols + 1) for _ in range(rows + 1)]
        for i in range(1, rows + 1):
            for j in range(1, cols + 1):
                if value[i - 1] == sentence[j - 1]:
                    table[i][j] = table[i - 1][j - 1] + 1
                else:
                    table[i][j] = max(table[i - 1][j], table[i][j - 1])
        return table[rows][cols] / rows

    precisions = []
    ref_recalls = []
    for order in range(1, MAX_ORDER + 1):
        pred_counts = _ngrams(pred, order)
        ref_counts = _ngrams(ref, order)
        numerator = 0.0
        denominator = 0.0
        for gram, count in pred_counts.items():
            denominator += count
            prob_in_ref = min(1.0, ref_counts.get(gram, 0) / count)
            numerator += count * (prob_in_ref + (1.0 - prob_in_ref) * entail(gram))
        if denominator > 0:
            precisions.append(numerator / denominator)
        rec_numerator = 0.0
        rec_denominator = 0.0
        for gram, count in ref_counts.items():
            weight = entail(gram)
            rec_denominator += count * weight
            rec_numerator += min(count, pred_counts.get(gram, 0)) * weight
        if rec_denominator > 0:
            ref_recalls.append(rec_numerator / rec_denominator)

    def geomean(values: list[float]) -> float:
        floored = [max(v, 1e-12) for v in values]
        return math.exp(sum(math.log(v) for v in floored) / len(floored))

    e_p = geomean(precisions) if precisions else 0.0
    if cell_tokens:
        table_recall = sum(mention(value, pred) for value in cell_tokens) / len(cell_tokens)
    else:
        table_recall = 1.0
    ref_recall = geomean(ref_recalls) if ref_recalls else table_recall
    e_r = (ref_recall ** lambda_weight) * (table_recall ** (1.0 - lambda_weight))
    f = 2 * e_p * e_r / (e_p + e_r) if e_p + e_r > 0 else 0.0
    return {"entailed_precision": e_p, "entailed_recall": e_r, "f_score": f}


# --- fixture construction -----------------------------------------------------

FIRST_NAMES = ["Alexis", "Kris", "Jordan", "Gabriel", "Andrew", "Maksim",
               "Aleksey", "Teodor", "Semen", "Yevgeni", "Kearsley", "Vicente",
               "Gustaaf", "Anne", "Lucy", "George", "Martina", "Rafael"]
LAST_NAMES = ["Brown", "Carretero", "Deloor", "Walker", "Wong", "Botin",
              "Ostapenko", "Salparov", "Poltavskiy", "Sivozhelez", "Chuter",
              "Navratilova", "Nadal"]
CITIES = ["Vancouver", "Madrid", "Bilbao", "London", "Fontana", "Daytona Beach",
          "Homestead", "Kansas City", "Ridgeway", "Hong Kong", "Denver"]
SUBJECTS = ["Math", "Science", "History", "Bible", "Music", "Art", "Biology"]
PARKS = ["Stark's Park", "Glebe Park", "Somerset Park", "Recreation Park",
         "Balmoor", "Hampden Park", "Gayfield Park"]


def _person(rng: random.Random) -> str:
    return f"{rng.choice(FIRST_NAMES)} {rng.choice(LAST_NAMES)}"


def _make_item(rng: random.Random, idx: int) -> dict:
    kind = idx % 4
    if kind == 0:
        rows = [[_person(rng), rng.choice(CITIES)] for _ in range(rng.randint(2, 5))]
        headers = ["Name", "Hometown"]
        query = "What are the names and hometowns of the teachers?"
        parts = [f"{name} is from {city}" for name, city in rows]
        reference = (f"There are {len(rows)} teachers in total. "
                     + ", ".join(parts) + ".")
    elif kind == 1:
        rows = [[rng.choice(PARKS), str(rng.randint(1, 4))]
                for _ in range(rng.randint(2, 5))]
        headers = ["Name", "count(*)"]
        query = "For each stadium, how many concerts play there?"
        parts = [f"{park} hosts {count} concerts" for park, count in rows]
        reference = (f"There are {len(rows)} stadiums hosting concerts. "
                     + ", ".join(parts) + ".")
    elif kind == 2:
        rows = [[_person(rng)] for _ in range(rng.randint(2, 6))]
        headers = ["Name"]
        query = "What are the names of poker players in descending order of earnings?"
        names = [r[0] for r in rows]
        reference = (f"There are {len(rows)} poker players listed in descending "
                     f"order of earnings. The players are " + ", ".join(names) + ".")
    else:
        rows = [[rng.choice(SUBJECTS), _person(rng)]
                for _ in range(rng.randint(2, 5))]
        headers = ["Course", "Teacher"]
        query = "Show the courses and the teachers arranged to teach them."
        parts = [f"{teacher} teaches {course}" for course, teacher in rows]
        reference = (f"There are {len(rows)} course arrangements. "
                     + ", ".join(parts) + ".")

    # Predictions perturb the reference: drop a clause, swap an entity, or
    # echo it verbatim, so lexical overlap spans the whole quality range.
    roll = rng.random()
    if roll < 0.2:
        prediction = reference
    elif roll < 0.55:
        words = reference.split()
        cut = rng.randrange(len(words) // 2, len(words))
        prediction = " ".join(words[:cut]) + "."
    elif roll < 0.8:
        donor = _person(rng)
        victim = rows[rng.randrange(len(rows))][0 if headers[0] == "Name" else -1]
        prediction = reference.replace(victim, donor, 1)
    else:
        names = ", ".join(r[0] for r in rows)
        prediction = (f"The table lists {len(rows)} rows relevant to the query. "
                      f"They include {names} among the results.")
    return {
        "id": f"pair-{idx:03d}",
        "query": query,
        "table": {"name": "result", "headers": headers, "rows": rows},
        "reference": reference,
        "prediction": prediction,
    }


def build_fixture(n_pairs: int = 50, seed: int = 20240917) -> list[dict]:
    rng = random.Random(seed)
    return [_make_item(rng, i) for i in range(n_pairs)]


def main() -> None:
    root = Path(__file__).resolve().parent.parent
    data_dir = root / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    fixture = build_fixture()
    predictions = [item["prediction"] for item in fixture]
    references = [item["reference"] for item in fixture]

    expected = {
        "rouge_l": [rouge_l_oracle(p, r) for p, r in zip(predictions, references)],
        "parent": [
            parent_oracle(item["prediction"], item["reference"],
                          [c for row in item["table"]["rows"] for c in row])
            for item in fixture
        ],
        "corpus_bleu": bleu_oracle(predictions, references),
        "corpus_bleu_first20": bleu_oracle(predictions[:20], references[:20]),
    }

    fixture_path = data_dir / "metric_fixture.json"
    expected_path = data_dir / "metric_expected.json"
    fixture_path.write_text(json.dumps(fixture, indent=2, ensure_ascii=False) + "\n",
                            encoding="utf-8")
    expected_path.write_text(json.dumps(expected, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {fixture_path}")
    print(f"wrote {expected_path}")
    print(f"corpus BLEU (oracle): {expected['corpus_bleu']:.4f}")


if __name__ == "__main__":
    main()
