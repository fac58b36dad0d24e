"""The two summarization strategies and their structured-output parsers.

Direct summarization issues one completion that must contain both a
"Facts:" section and a "Summary:" section; reason-then-summarize issues two
sequential completions, the first producing facts and the second a summary
conditioned on those facts. Prompt wording lives in the template files; this
module only assembles demonstrations and inputs into the slots.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Protocol, Sequence

from .gateway import GatewayResponse, GenerationParams
from .linearize import linearize_table
from .model import Example, Table
from .prompts import PromptBundle, fill, load_template, load_template_json

logger = logging.getLogger(__name__)

DEFAULT_DEMO_COUNT = 3


class ControllerError(RuntimeError):
    pass


class PromptBuildError(ControllerError):
    pass


class OutputParseError(ControllerError):
    pass


class Gateway(Protocol):
    def complete(self, prompt: PromptBundle | str,
                 params: GenerationParams | None = None) -> GatewayResponse: ...


@dataclass(frozen=True)
class Demonstration:
    """One worked example shown to the model before the real input."""

    query: str
    linearized_tables: str
    facts: str
    summary: str

    def violations(self) -> list[str]:
        out = []
        for name in ("query", "linearized_tables", "facts", "summary"):
            if not getattr(self, name):
                out.append(f"{name} is empty")
        return out


@dataclass(frozen=True)
class ControllerOutput:
    """Parsed result of running one strategy on one example."""

    facts: tuple[str, ...]
    summary: str
    raw_phase_texts: tuple[str, ...]


def load_default_demonstrations(kind: str = "direct") -> list[Demonstration]:
    """Built-in demonstrations from the bundled data file.

    ``kind`` selects the facts variant: the phase-2 prompt shows a facts
    wording that differs slightly from phase 1 for the first demonstration.
    """
    records = load_template_json("demonstrations.json")
    demos = []
    for rec in records:
        tables = "\n".join(f"Table {i}: {t}" for i, t in enumerate(rec["tables"], start=1))
        facts = rec["facts"]
        if kind == "reason_phase2" and "facts_phase2" in rec:
            facts = rec["facts_phase2"]
        demos.append(Demonstration(rec["query"], tables, facts, rec["summary"]))
    return demos


def _check_demos(demos: Sequence[Demonstration]) -> None:
    if not demos:
        raise PromptBuildError("demonstrations must be non-empty")
    for i, demo in enumerate(demos):
        violations = demo.violations()
        if violations:
            raise PromptBuildError(f"demonstration {i} invalid: {'; '.join(violations)}")


def _render_demo_direct(demo: Demonstration) -> str:
    return (f"Query: {demo.query}\n{demo.linearized_tables}\n"
            f"Facts: {demo.facts}\nSummary: {demo.summary}")


def _render_demo_phase1(demo: Demonstration) -> str:
    return f"Query: {demo.query}\n{demo.linearized_tables}\nFacts: {demo.facts}"


def _render_demo_phase2(demo: Demonstration) -> str:
    return f"Query: {demo.query}\nFacts: {demo.facts}\nSummary: {demo.summary}"


def _tables_text(tables: Sequence[Table]) -> str:
    if not tables:
        raise PromptBuildError("tables must be non-empty")
    return " ".join(linearize_table(t).text for t in tables)


def build_direct_prompt(query: str, tables: Sequence[Table],
                        demos: Sequence[Demonstration] | None = None) -> PromptBundle:
    if demos is None:
        demos = load_default_demonstrations("direct")
    _check_demos(demos)
    blocks = tuple(_render_demo_direct(d) for d in demos)
    text = fill(load_template("direct.txt"),
                demonstrations="\n\n".join(blocks),
                query=query,
                tables=_tables_text(tables))
    return PromptBundle(text=text, demonstrations=blocks, kind="direct")


def build_reason_prompt(query: str, tables: Sequence[Table],
                        demos: Sequence[Demonstration] | None = None) -> PromptBundle:
    if demos is None:
        demos = load_default_demonstrations("reason_phase1")
    _check_demos(demos)
    blocks = tuple(_render_demo_phase1(d) for d in demos)
    text = fill(load_template("reason_phase1.txt"),
                demonstrations="\n\n".join(blocks),
                query=query,
                tables=_tables_text(tables))
    return PromptBundle(text=text, demonstrations=blocks, kind="reason_phase1")


def build_summarize_prompt(query: str, facts: Sequence[str],
                           demos: Sequence[Demonstration] | None = None) -> PromptBundle:
    if not facts:
        raise PromptBuildError("phase 1 produced no facts")
    if demos is None:
        demos = load_default_demonstrations("reason_phase2")
    _check_demos(demos)
    blocks = tuple(_render_demo_phase2(d) for d in demos)
    text = fill(load_template("reason_phase2.txt"),
                demonstrations="\n\n".join(blocks),
                query=query,
                facts=", ".join(facts))
    return PromptBundle(text=text, demonstrations=blocks, kind="reason_phase2")


def _find_marker(text: str, marker: str, last: bool = False) -> int:
    """Index just past the marker, or -1. Falls back to lowercase once."""
    finder = text.rfind if last else text.find
    pos = finder(marker)
    if pos < 0:
        pos = (text.lower().rfind if last else text.lower().find)(marker.lower())
    return pos if pos < 0 else pos + len(marker)


def parse_facts(text: str) -> list[str]:
    start = _find_marker(text, "Facts:")
    if start < 0:
        raise OutputParseError("missing Facts marker")
    body = text[start:]
    # DirectSumm completions carry a Summary section after the facts.
    cut = body.find("Summary:")
    if cut < 0:
        cut = body.lower().find("summary:")
    if cut >= 0:
        body = body[:cut]
    return [item.strip() for item in body.split(",") if item.strip()]


def parse_summary(text: str) -> str:
    start = _find_marker(text, "Summary:", last=True)
    if start < 0:
        raise OutputParseError("missing Summary marker")
    body = text[start:]
    # Guard against a trailing Facts section after the last summary.
    cut = body.find("Facts:")
    if cut < 0:
        cut = body.lower().find("facts:")
    if cut >= 0:
        body = body[:cut]
    return body.strip()


def run_direct(example: Example, gateway: Gateway,
               params: GenerationParams | None = None,
               demos: Sequence[Demonstration] | None = None) -> ControllerOutput:
    prompt = build_direct_prompt(example.query, example.input_tables, demos)
    try:
        response = gateway.complete(prompt, params)
        summary = parse_summary(response.text)
    except ControllerError as exc:
        raise OutputParseError(f"example {example.id}: {exc}") from exc
    except Exception as exc:
        raise ControllerError(f"example {example.id}: {exc}") from exc
    return ControllerOutput(facts=(), summary=summary,
                            raw_phase_texts=(response.text,))


def run_reason_then_summ(example: Example, gateway: Gateway,
                         params: GenerationParams | None = None,
                         demos_phase1: Sequence[Demonstration] | None = None,
                         demos_phase2: Sequence[Demonstration] | None = None) -> ControllerOutput:
    phase1 = build_reason_prompt(example.query, example.input_tables, demos_phase1)
    try:
        response1 = gateway.complete(phase1, params)
        facts = parse_facts(response1.text)
        phase2 = build_summarize_prompt(example.query, facts, demos_phase2)
    except ControllerError as exc:
        raise OutputParseError(f"example {example.id}: {exc}") from exc
    except Exception as exc:
        raise ControllerError(f"example {example.id}: {exc}") from exc
    try:
        response2 = gateway.complete(phase2, params)
        summary = parse_summary(response2.text)
    except ControllerError as exc:
        raise OutputParseError(f"example {example.id}: {exc}") from exc
    except Exception as exc:
        raise ControllerError(f"example {example.id}: {exc}") from exc
    return ControllerOutput(facts=tuple(facts), summary=summary,
                            raw_phase_texts=(response1.text, response2.text))


STRATEGIES = ("direct", "reason")


@dataclass(frozen=True)
class PredictionRecord:
    """One line of a predictions JSONL file."""

    id: str
    strategy: str
    facts: tuple[str, ...] = ()
    summary: str = ""
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"id": self.id, "strategy": self.strategy,
               "facts": list(self.facts), "summary": self.summary}
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PredictionRecord":
        return cls(id=data["id"], strategy=data["strategy"],
                   facts=tuple(data.get("facts", ())),
                   summary=data.get("summary", ""),
                   error=data.get("error"))


def write_predictions(records: Sequence[PredictionRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")


def read_predictions(path) -> list[PredictionRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(PredictionRecord.from_dict(json.loads(line)))
    return out


def run_batch(examples: Sequence[Example], gateway: Gateway, strategy: str,
              params: GenerationParams | None = None,
              max_workers: int = 4) -> list[PredictionRecord]:
    """Run one strategy over a batch; failures are recorded, not raised.

    Examples run concurrently up to max_workers, but the two phases of any
    one example stay sequential inside its task. Output order follows input
    order regardless of completion order.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    runner = run_direct if strategy == "direct" else run_reason_then_summ

    def one(example: Example) -> PredictionRecord:
        try:
            output = runner(example, gateway, params)
        except Exception as exc:
            logger.warning("summarization failed: %s", exc)
            return PredictionRecord(id=example.id, strategy=strategy, error=str(exc))
        return PredictionRecord(id=example.id, strategy=strategy,
                                facts=output.facts, summary=output.summary)

    if max_workers <= 1 or len(examples) <= 1:
        return [one(ex) for ex in examples]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, examples))
