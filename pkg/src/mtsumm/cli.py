"""Command-line entry points for the whole workbench.

Verbs: build-dataset, annotate, summarize, score, verify, serve. A config
file (TOML or JSON) can pre-set options; explicit flags win over the file.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .build import BuildConfig, annotate_batch, build_dataset
from .controller import (STRATEGIES, read_predictions, run_batch,
                         write_predictions)
from .gateway import GenerationParams, MockGateway, OpenAIChatGateway
from .harness import evaluate_run, render_report, verify_corpus
from .model import SPLITS, compute_stats, read_jsonl, write_jsonl

logger = logging.getLogger(__name__)


def _parse_toml_value(raw: str):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw.startswith("'") and raw.endswith("'") and len(raw) >= 2:
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"unsupported TOML value: {raw!r}")


def _parse_flat_toml(text: str) -> dict:
    """Minimal TOML subset: sections plus scalar key = value lines.

    Used only when the interpreter has no tomllib (Python < 3.11); covers
    the flat config files this tool documents, nothing more.
    """
    out: dict = {}
    section = out
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = out
            for part in stripped[1:-1].strip().split("."):
                section = section.setdefault(part.strip(), {})
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        section[key.strip().strip('"')] = _parse_toml_value(raw)
    return out


def load_config(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".json"):
        return json.loads(text)
    try:
        import tomllib
    except ModuleNotFoundError:
        return _parse_flat_toml(text)
    return tomllib.loads(text)


def _setting(ctx: click.Context, key: str, flag_value, default):
    """Resolve an option: explicit flag > config file > default."""
    if flag_value is not None:
        return flag_value
    return ctx.obj["config"].get(key, default)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML or JSON config file.")
@click.option("--seed", type=int, default=None, help="Global RNG seed.")
@click.option("--log-level", default=None,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"],
                                case_sensitive=False))
@click.pass_context
def main(ctx, config_path, seed, log_level):
    """Query-focused multi-table summarization workbench."""
    config = load_config(config_path) if config_path else {}
    level = (log_level or config.get("log_level") or "INFO").upper()
    logging.basicConfig(level=getattr(logging, level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    ctx.obj = {"config": config, "seed": seed}


def _resolve_seed(ctx) -> int:
    if ctx.obj["seed"] is not None:
        return ctx.obj["seed"]
    return int(ctx.obj["config"].get("seed", 0))


def _gateway(ctx, endpoint: str | None, mock_path: str | None,
             audit: str | None):
    if mock_path:
        spec = json.loads(Path(mock_path).read_text(encoding="utf-8"))
        return MockGateway(
            by_hash=spec.get("by_hash", {}),
            rules=[(tuple(needles), response)
                   for needles, response in spec.get("rules", [])],
            default=spec.get("default"),
        )
    base_url = endpoint or ctx.obj["config"].get("endpoint")
    return OpenAIChatGateway(base_url=base_url, audit_path=audit)


@main.command("build-dataset")
@click.option("--spider-dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--validation-fraction", type=float, default=None)
@click.option("--single-table-target-fraction", type=float, default=None)
@click.pass_context
def build_dataset_cmd(ctx, spider_dir, out, validation_fraction,
                      single_table_target_fraction):
    """Reconstruct an unannotated dataset from a Spider distribution."""
    config = BuildConfig(
        seed=_resolve_seed(ctx),
        validation_fraction=_setting(ctx, "validation_fraction",
                                     validation_fraction, 0.10),
        single_table_target_fraction=_setting(
            ctx, "single_table_target_fraction", single_table_target_fraction,
            0.328),
    )
    examples = build_dataset(spider_dir, config)
    write_jsonl(examples, out)
    stats = compute_stats(examples)
    click.echo(f"wrote {len(examples)} examples to {out}")
    for split in SPLITS:
        click.echo(f"  {split}: {stats.count(split)}")
    click.echo(f"  single/double/3+ fractions: "
               f"{stats.single_table_fraction:.3f} / "
               f"{stats.double_table_fraction:.3f} / "
               f"{stats.many_table_fraction:.3f}")
    click.echo(f"  mean tables per example: {stats.mean_tables_per_example:.2f}")


@main.command("annotate")
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--endpoint", default=None, help="Chat-completions base URL.")
@click.option("--mock", "mock_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Mock response spec (JSON) instead of a live endpoint.")
@click.option("--model", default=None)
@click.option("--max-in-flight", type=int, default=None)
@click.option("--audit", default=None, type=click.Path(dir_okay=False),
              help="JSONL audit log for live calls.")
@click.option("--only-empty/--all", default=True,
              help="Annotate only examples without a summary (default).")
@click.pass_context
def annotate_cmd(ctx, in_path, out, endpoint, mock_path, model, max_in_flight,
                 audit, only_empty):
    """Fill summaries through the annotation prompt."""
    config = BuildConfig(
        seed=_resolve_seed(ctx),
        annotator_model=_setting(ctx, "annotator_model", model,
                                 "gpt-3.5-turbo-0613"),
        max_in_flight=_setting(ctx, "max_in_flight", max_in_flight, 4),
    )
    examples = read_jsonl(in_path)
    todo = [ex for ex in examples if not (only_empty and ex.summary)]
    gateway = _gateway(ctx, endpoint, mock_path, audit)
    annotated, errors = annotate_batch(todo, gateway, config)
    by_id = {ex.id: ex for ex in annotated}
    merged = [by_id.get(ex.id, ex) for ex in examples]
    write_jsonl(merged, out)
    click.echo(f"annotated {len(todo) - len(errors)}/{len(todo)} examples "
               f"-> {out}")
    for err in errors:
        click.echo(f"  ERROR {err}", err=True)
    if errors:
        sys.exit(1)


@main.command("summarize")
@click.option("--strategy", required=True, type=click.Choice(list(STRATEGIES)))
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--split", default="test", type=click.Choice(list(SPLITS)))
@click.option("--endpoint", default=None)
@click.option("--mock", "mock_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", default=None)
@click.option("--max-in-flight", type=int, default=None)
@click.option("--audit", default=None, type=click.Path(dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def summarize_cmd(ctx, strategy, dataset_path, split, endpoint, mock_path,
                  model, max_in_flight, audit, out):
    """Generate summaries with one of the two prompting strategies."""
    examples = [ex for ex in read_jsonl(dataset_path) if ex.split == split]
    if not examples:
        raise click.ClickException(f"no examples in split {split!r}")
    gateway = _gateway(ctx, endpoint, mock_path, audit)
    params = GenerationParams(
        model_name=_setting(ctx, "model", model, "gpt-3.5-turbo-0613"))
    workers = _setting(ctx, "max_in_flight", max_in_flight, 4)
    records = run_batch(examples, gateway, strategy, params,
                        max_workers=workers)
    write_predictions(records, out)
    failed = sum(1 for r in records if r.error is not None)
    click.echo(f"wrote {len(records)} predictions ({failed} failed) -> {out}")


@main.command("score")
@click.option("--pred", "pred_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--bertscore", "bertscore_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Optional JSONL sidecar of {id, bertscore}.")
@click.option("--lambda", "lambda_weight", type=float, default=0.5,
              help="PARENT recall mixing weight.")
@click.pass_context
def score_cmd(ctx, pred_path, dataset_path, out, bertscore_path, lambda_weight):
    """Score a prediction file and write the JSON report."""
    predictions = read_predictions(pred_path)
    dataset = read_jsonl(dataset_path)
    bertscores = None
    if bertscore_path:
        bertscores = {}
        with open(bertscore_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    bertscores[rec["id"]] = rec["bertscore"]
    report = evaluate_run(predictions, dataset, lambda_weight=lambda_weight,
                          bertscores=bertscores)
    text, machine = render_report(report)
    Path(out).write_text(machine, encoding="utf-8")
    click.echo(text, nl=False)
    click.echo(f"report -> {out}")


@main.command("verify")
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def verify_cmd(ctx, dataset_path):
    """Mean completeness of annotated summaries, overall and per split."""
    examples = [ex for ex in read_jsonl(dataset_path) if ex.summary]
    if not examples:
        raise click.ClickException("dataset has no annotated summaries")
    result = verify_corpus(examples)
    click.echo(json.dumps(result, indent=2, sort_keys=True))


@main.command("serve")
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--db", "db_path", required=True, type=click.Path(dir_okay=False))
@click.option("--pool-size", type=int, default=100)
@click.option("--static", "static_dir", default=None,
              type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.pass_context
def serve_cmd(ctx, dataset_path, db_path, pool_size, static_dir, host, port):
    """Start the human-review HTTP service."""
    import uvicorn

    from .review import create_app
    app = create_app(dataset_path, db_path, seed=_resolve_seed(ctx),
                     pool_size=pool_size, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
