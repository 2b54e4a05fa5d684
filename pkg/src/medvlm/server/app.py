"""FastAPI app serving a checkpoint over the chat-completions protocol.

The flattened dialogue fed to the model matches LocalChatClient exactly,
so evaluating over HTTP and in-process produce the same outputs.
"""

from __future__ import annotations

import base64
import binascii
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException

from medvlm import __version__
from medvlm.errors import ConfigError, DataError, MedvlmError
from medvlm.metrics.corpus import score_report_corpus
from medvlm.model.checkpoint import load_checkpoint
from medvlm.model.ppm import parse_ppm
from medvlm.model.tokenizer import IMAGE_MARKER
from medvlm.model.vlm import MedVlm
from medvlm.server.schemas import (
    AssistantMessage,
    ChatChoice,
    ChatRequest,
    ChatResponse,
    HealthResponse,
    MetricsRequest,
    MetricsResponse,
    ReportRecord,
)


def _flatten(req: ChatRequest) -> tuple[str, list]:
    lines: list[str] = []
    images: list = []
    for m in req.messages:
        bits: list[str] = []
        for part in m.content:
            if part.type == "image":
                try:
                    raw = base64.b64decode(part.data, validate=True)
                except (binascii.Error, ValueError) as e:
                    raise HTTPException(400, f"bad base64 image data: {e}") from e
                try:
                    images.append(parse_ppm(raw))
                except DataError as e:
                    raise HTTPException(400, str(e)) from e
                bits.append(IMAGE_MARKER)
            else:
                bits.append(part.text)
        lines.append(f"{m.role}: " + "\n".join(bits))
    return "\n".join(lines) + "\nassistant:", images


def _apply_stop(text: str, stop: list[str]) -> str:
    for s in stop:
        if s:
            idx = text.find(s)
            if idx >= 0:
                text = text[:idx]
    return text


def _records_to_map(records: list[ReportRecord]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for r in records:
        if r.report_id in out:
            raise HTTPException(400, f"duplicate report_id {r.report_id!r}")
        rec: dict = {"report_id": r.report_id}
        if r.text is not None:
            rec["text"] = r.text
        if r.entities is not None:
            rec["entities"] = r.entities
        out[r.report_id] = rec
    return out


def create_app(checkpoint_path: str | Path) -> FastAPI:
    params, config, _meta = load_checkpoint(checkpoint_path)
    model = MedVlm(config, params)
    n_params = int(sum(a.size for a in params.values()))
    # one generation at a time; the decoder re-forwards per token and is not
    # written for concurrent numpy scratch use
    generate_lock = threading.Lock()

    app = FastAPI(title="medvlm", version=__version__)

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse(status="ok", model="medvlm-toy", n_params=n_params)

    @app.post("/v1/chat/completions", response_model=ChatResponse)
    def chat_completions(req: ChatRequest) -> ChatResponse:
        if req.temperature != 0.0:
            raise HTTPException(400, "only deterministic decoding is supported; "
                                     "set temperature to 0")
        prompt, images = _flatten(req)
        try:
            with generate_lock:
                text = model.generate_text(prompt, images, max_new_tokens=req.max_tokens)
        except MedvlmError as e:
            raise HTTPException(400, str(e)) from e
        text = _apply_stop(text, req.stop)
        return ChatResponse(
            model=req.model,
            choices=[ChatChoice(index=0, message=AssistantMessage(content=text))],
        )

    @app.post("/v1/metrics/report", response_model=MetricsResponse)
    def metrics_report(req: MetricsRequest) -> MetricsResponse:
        try:
            result = score_report_corpus(_records_to_map(req.pred),
                                         _records_to_map(req.ref), req.metric)
        except (DataError, ConfigError) as e:
            raise HTTPException(400, str(e)) from e
        return MetricsResponse(
            metric=result["metric"],
            n=result["n"],
            mean=result["mean"],
            reciprocal_mean=result.get("reciprocal_mean"),
            per_report=result["per_report"],
        )

    return app
