"""Evaluation harness: prompt templates, deterministic decode clients, extraction, scoring."""

from medvlm.harness.client import (
    API_KEY_ENV,
    CompletionResult,
    EndpointConfig,
    HttpChatClient,
    LocalChatClient,
)
from medvlm.harness.extract import extract_option
from medvlm.harness.runner import run_eval
from medvlm.harness.scoring import EvalRecord, format_summary_table, score_records
from medvlm.harness.templates import DEFAULT_TEMPLATE, TEMPLATE_IDS, format_prompt

__all__ = [
    "API_KEY_ENV",
    "CompletionResult",
    "DEFAULT_TEMPLATE",
    "EndpointConfig",
    "EvalRecord",
    "HttpChatClient",
    "LocalChatClient",
    "TEMPLATE_IDS",
    "extract_option",
    "format_prompt",
    "format_summary_table",
    "run_eval",
    "score_records",
]
