"""Prompt assembly primitives: the PromptBundle record and template loading.

Template texts live under ``mtsumm/templates`` as data files, not code; they
are filled by plain placeholder substitution ({query}, {tables}, {facts},
{demonstrations}).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class PromptBundle:
    """A fully assembled prompt for one LLM call."""

    text: str
    demonstrations: tuple[str, ...]
    kind: str  # "direct" | "reason_phase1" | "reason_phase2" | "annotation"

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


def load_template(name: str) -> str:
    # Template files carry a trailing newline; the assembled prompt must not.
    text = resources.files("mtsumm.templates").joinpath(name).read_text(encoding="utf-8")
    return text.rstrip("\n")


def load_template_json(name: str):
    return json.loads(load_template(name))


def fill(template: str, **slots: str) -> str:
    out = template
    for key, value in slots.items():
        out = out.replace("{" + key + "}", value)
    return out
