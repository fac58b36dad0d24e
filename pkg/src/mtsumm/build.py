"""Dataset reconstruction: sampling, splitting, and LLM-backed annotation.

The pipeline mirrors the source-corpus recipe: load examples from a Spider
distribution, down-sample single-table examples until multi-table examples
predominate, allocate dev-origin examples to test and split train-origin
examples 90/10 into train/validation, then annotate summaries through a
chat-completion gateway using the execution table as evidence.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .gateway import GatewayResponse, GenerationParams
from .linearize import linearize_table
from .model import Example, Table
from .prompts import PromptBundle, fill, load_template, load_template_json

logger = logging.getLogger(__name__)


class BuildError(RuntimeError):
    pass


class AnnotationError(BuildError):
    pass


def default_annotation_demos() -> tuple[tuple[str, str, str], ...]:
    """The bundled 5-shot demonstrations as (query, table, summary) triples."""
    records = load_template_json("annotation_demos.json")
    return tuple((r["query"], r["table"], r["summary"]) for r in records)


@dataclass(frozen=True)
class BuildConfig:
    seed: int = 0
    validation_fraction: float = 0.10
    single_table_target_fraction: float = 0.328
    annotation_demos: tuple[tuple[str, str, str], ...] = field(
        default_factory=default_annotation_demos)
    annotator_model: str = "gpt-3.5-turbo-0613"
    max_in_flight: int = 4

    def __post_init__(self):
        if not 0 < self.validation_fraction < 1:
            raise ValueError(f"validation_fraction must be in (0,1), "
                             f"got {self.validation_fraction}")
        if not 0 < self.single_table_target_fraction < 1:
            raise ValueError(f"single_table_target_fraction must be in (0,1), "
                             f"got {self.single_table_target_fraction}")
        if self.max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {self.max_in_flight}")


def downsample_single_table(examples: Sequence[Example],
                            config: BuildConfig) -> list[Example]:
    """Drop random single-table examples until their fraction is at most the
    configured target; multi-table examples are never removed.

    Examples are pooled by origin tag so the later train/dev split sizes stay
    deterministic; untagged examples form one pool. A pool with no
    multi-table examples is kept whole (no fraction can be reached by
    deletion alone).
    """
    rng = random.Random(config.seed)
    pools: dict[str | None, list[int]] = {}
    for idx, ex in enumerate(examples):
        pools.setdefault(ex.spider_split, []).append(idx)
    keep: set[int] = set()
    target = config.single_table_target_fraction
    for origin in sorted(pools, key=lambda o: (o is None, o or "")):
        singles = [i for i in pools[origin] if len(examples[i].input_tables) == 1]
        multis = [i for i in pools[origin] if len(examples[i].input_tables) > 1]
        keep.update(multis)
        m, s = len(multis), len(singles)
        if s == 0:
            continue
        if m == 0 or s / (m + s) <= target:
            keep.update(singles)
            continue
        # Largest k with k/(k+m) <= target; the epsilon absorbs float error.
        k = int(target * m / (1.0 - target) + 1e-9)
        while k > 0 and k / (k + m) > target:
            k -= 1
        keep.update(rng.sample(singles, k))
    return [ex for idx, ex in enumerate(examples) if idx in keep]


def split(examples: Sequence[Example],
          config: BuildConfig) -> tuple[list[Example], list[Example], list[Example]]:
    """Partition by origin: dev-origin becomes test; train-origin is split
    into train/validation by a seeded shuffle. Original order is preserved
    within each output split.
    """
    untagged = [ex.id for ex in examples if ex.spider_split not in ("train", "dev")]
    if untagged:
        shown = ", ".join(untagged[:5])
        raise BuildError(f"missing origin tag for {len(untagged)} example(s): {shown}")
    test = [ex.with_split("test") for ex in examples if ex.spider_split == "dev"]
    train_pool = [ex for ex in examples if ex.spider_split == "train"]
    n_val = int(round(len(train_pool) * config.validation_fraction))
    order = list(range(len(train_pool)))
    random.Random(config.seed).shuffle(order)
    val_idx = set(order[:n_val])
    validation = [ex.with_split("validation")
                  for i, ex in enumerate(train_pool) if i in val_idx]
    train = [ex.with_split("train")
             for i, ex in enumerate(train_pool) if i not in val_idx]
    return train, validation, test


def build_annotation_prompt(query: str, execution_table: Table,
                            config: BuildConfig) -> PromptBundle:
    if not config.annotation_demos:
        raise BuildError("annotation_demos must be non-empty")
    blocks = tuple(f"Query: {q}\nTable: {t}\nSummary: {s}"
                   for q, t, s in config.annotation_demos)
    text = fill(load_template("annotation.txt"),
                guideline=load_template("annotation_guideline.txt"),
                demonstrations="\n\n".join(blocks),
                query=query,
                table=linearize_table(execution_table).text)
    return PromptBundle(text=text, demonstrations=blocks, kind="annotation")


def annotate(example: Example, gateway, config: BuildConfig,
             params: GenerationParams | None = None) -> Example:
    prompt = build_annotation_prompt(example.query, example.execution_table, config)
    if params is None:
        params = GenerationParams(model_name=config.annotator_model)
    try:
        response: GatewayResponse = gateway.complete(prompt, params)
    except Exception as exc:
        raise AnnotationError(f"annotation failed for id={example.id}: {exc}") from exc
    return example.with_summary(response.text.strip())


def annotate_batch(examples: Sequence[Example], gateway, config: BuildConfig,
                   params: GenerationParams | None = None
                   ) -> tuple[list[Example], list[str]]:
    """Annotate many examples with bounded parallelism.

    Failures do not abort the batch: the failed example keeps its empty
    summary and the error message is returned alongside. Output order
    follows input order.
    """

    def one(example: Example) -> tuple[Example, str | None]:
        try:
            return annotate(example, gateway, config, params), None
        except AnnotationError as exc:
            logger.warning("%s", exc)
            return example, str(exc)

    if config.max_in_flight <= 1 or len(examples) <= 1:
        results = [one(ex) for ex in examples]
    else:
        with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
            results = list(pool.map(one, examples))
    annotated = [ex for ex, _ in results]
    errors = [err for _, err in results if err is not None]
    return annotated, errors


# --- Spider distribution loading ---------------------------------------------

SPIDER_QUERY_FILES = {
    "train": ("train_spider.json", "train_others.json"),
    "dev": ("dev.json",),
}


def _table_indices(node) -> list[int]:
    """Collect table references from a Spider SQL parse tree, in order.

    Table references appear as ["table_unit", <index into the schema's
    table list>]; nested subqueries are plain dicts and are walked too.
    """
    found: list[int] = []

    def walk(item) -> None:
        if isinstance(item, dict):
            for value in item.values():
                walk(value)
        elif isinstance(item, (list, tuple)):
            if (len(item) == 2 and item[0] == "table_unit"
                    and isinstance(item[1], int)):
                found.append(item[1])
            else:
                for value in item:
                    walk(value)

    walk(node)
    ordered: list[int] = []
    for idx in found:
        if idx not in ordered:
            ordered.append(idx)
    return ordered


def load_spider(spider_dir) -> list[Example]:
    """Read a Spider distribution into untagged-split Examples.

    Records whose database is missing or whose SQL fails to execute are
    skipped with a warning; reconstruction tolerates a corpus that has
    drifted from the published one.
    """
    from .sqlexec import (DatabaseHandle, extract_input_tables, execute_sql,
                          load_database)

    root = Path(spider_dir)
    tables_path = root / "tables.json"
    if not tables_path.exists():
        raise BuildError(f"not a Spider distribution: {tables_path} missing")
    schemas = {entry["db_id"]: entry["table_names_original"]
               for entry in json.loads(tables_path.read_text(encoding="utf-8"))}

    handles: dict[str, DatabaseHandle] = {}

    def handle_for(db_id: str) -> DatabaseHandle:
        if db_id not in handles:
            handles[db_id] = load_database(root / "database" / db_id / f"{db_id}.sqlite")
        return handles[db_id]

    examples: list[Example] = []
    skipped = 0
    try:
        for origin, filenames in SPIDER_QUERY_FILES.items():
            records: list[dict] = []
            for filename in filenames:
                path = root / filename
                if path.exists():
                    records.extend(json.loads(path.read_text(encoding="utf-8")))
                elif filename != "train_others.json":
                    raise BuildError(f"not a Spider distribution: {path} missing")
            for i, rec in enumerate(records):
                example_id = f"{origin}-{i:05d}"
                try:
                    handle = handle_for(rec["db_id"])
                    names = [schemas[rec["db_id"]][idx]
                             for idx in _table_indices(rec["sql"])]
                    if not names:
                        raise BuildError("no table references in SQL parse")
                    input_tables = tuple(extract_input_tables(handle, names))
                    execution_table = execute_sql(handle, rec["query"])
                except Exception as exc:
                    skipped += 1
                    logger.warning("skipping %s (%s): %s", example_id, rec.get("db_id"), exc)
                    continue
                examples.append(Example(
                    id=example_id,
                    query=rec["question"],
                    sql=rec["query"],
                    database_id=rec["db_id"],
                    input_tables=input_tables,
                    execution_table=execution_table,
                    summary="",
                    split="test" if origin == "dev" else "train",
                    spider_split=origin,
                ))
    finally:
        for handle in handles.values():
            handle.close()
    if skipped:
        logger.warning("skipped %d unloadable records", skipped)
    return examples


def build_dataset(spider_dir, config: BuildConfig) -> list[Example]:
    """Full reconstruction minus annotation: load, down-sample, split."""
    examples = load_spider(spider_dir)
    sampled = downsample_single_table(examples, config)
    train, validation, test = split(sampled, config)
    return train + validation + test
