"""Versioned chat templates turning benchmark instances into message lists.

A message is {"role": str, "content": [part, ...]} where a part is either
{"type": "text", "text": str} or {"type": "image", "path": str}.  Image
parts carry paths; clients load bytes at send time.
"""

from __future__ import annotations

import re

from medvlm.bench.schema import BenchmarkInstance
from medvlm.errors import ConfigError, DataError
from medvlm.model.tokenizer import IMAGE_MARKER

SYSTEM_PROMPT = "You are a careful assistant for medical question answering."
ANSWER_INSTRUCTION = "Answer with the option letter only."

DEFAULT_TEMPLATE = "medvlm-chat@1"
TEMPLATE_IDS = (DEFAULT_TEMPLATE,)

# marker plus at most one following whitespace char, so "<image>\nQ" -> "Q"
_MARKER = re.compile(re.escape(IMAGE_MARKER) + r"\s?")


def _text_part(text: str) -> dict:
    return {"type": "text", "text": text}


def _user_message(inst: BenchmarkInstance) -> dict:
    text, n_markers = _MARKER.subn("", inst.question)
    if n_markers != len(inst.images):
        raise DataError(
            f"instance {inst.id}: {n_markers} image markers but {len(inst.images)} images")
    parts: list[dict] = [{"type": "image", "path": p} for p in inst.images]
    lines = [text]
    if inst.options:
        lines.extend(f"{key}. {opt}" for key, opt in inst.options)
        lines.append(ANSWER_INSTRUCTION)
    parts.append(_text_part("\n".join(lines)))
    return {"role": "user", "content": parts}


def _shot_reply(shot: BenchmarkInstance) -> str:
    if shot.is_generation:
        return shot.meta.get("reference", "")
    return shot.answer_key


def _render_chat_v1(inst: BenchmarkInstance) -> list[dict]:
    messages = [{"role": "system", "content": [_text_part(SYSTEM_PROMPT)]}]
    for shot in inst.shots:
        messages.append(_user_message(shot))
        messages.append({"role": "assistant", "content": [_text_part(_shot_reply(shot))]})
    messages.append(_user_message(inst))
    return messages


_TEMPLATES = {DEFAULT_TEMPLATE: _render_chat_v1}


def format_prompt(inst: BenchmarkInstance, template_id: str = DEFAULT_TEMPLATE) -> list[dict]:
    render = _TEMPLATES.get(template_id)
    if render is None:
        raise ConfigError(
            f"unknown template {template_id!r}; registered: {sorted(_TEMPLATES)}")
    return render(inst)
