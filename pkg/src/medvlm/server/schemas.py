"""Pydantic request/response models for the chat and metrics endpoints."""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field


class TextPart(BaseModel):
    type: Literal["text"]
    text: str


class ImagePart(BaseModel):
    type: Literal["image"]
    data: str = Field(description="base64-encoded binary PPM (P6) bytes")


ContentPart = Annotated[Union[TextPart, ImagePart], Field(discriminator="type")]


class ChatMessage(BaseModel):
    role: Literal["system", "user", "assistant"]
    content: list[ContentPart]


class ChatRequest(BaseModel):
    model: str = "medvlm-toy"
    messages: list[ChatMessage] = Field(min_length=1)
    temperature: float = 0.0
    max_tokens: int = Field(default=64, ge=1, le=4096)
    stop: list[str] = Field(default_factory=list)


class AssistantMessage(BaseModel):
    role: Literal["assistant"] = "assistant"
    content: str


class ChatChoice(BaseModel):
    index: int = 0
    message: AssistantMessage


class ChatResponse(BaseModel):
    model: str
    choices: list[ChatChoice]


class HealthResponse(BaseModel):
    status: Literal["ok"]
    model: str
    n_params: int


class ReportRecord(BaseModel):
    report_id: str
    text: Optional[str] = None
    entities: Optional[list[dict]] = None


class MetricsRequest(BaseModel):
    metric: Literal["radgraph", "rate", "bleu", "radcliq"]
    pred: list[ReportRecord] = Field(min_length=1)
    ref: list[ReportRecord] = Field(min_length=1)


class MetricsResponse(BaseModel):
    metric: str
    n: int
    mean: float
    reciprocal_mean: Optional[float] = None
    per_report: list[dict]
