"""Chat clients: HTTP chat-completions endpoint and in-process local model.

Both consume template message lists and return one deterministic
completion.  Retries happen only on transport failures and 5xx replies,
never on response content.
"""

from __future__ import annotations

import base64
import os
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from medvlm.errors import ConfigError, EndpointError
from medvlm.model.checkpoint import load_checkpoint
from medvlm.model.ppm import read_ppm
from medvlm.model.tokenizer import IMAGE_MARKER
from medvlm.model.vlm import MedVlm

API_KEY_ENV = "MEDVLM_API_KEY"
CHAT_PATH = "/v1/chat/completions"


@dataclass
class EndpointConfig:
    base_url: str = ""
    model: str = "medvlm-toy"
    timeout_s: float = 30.0
    max_retries: int = 2
    concurrency: int = 1
    temperature: float = 0.0
    max_new_tokens: int = 2048
    stop: tuple[str, ...] = field(default_factory=tuple)

    def validate(self) -> "EndpointConfig":
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.concurrency < 1:
            raise ConfigError(f"concurrency must be >= 1, got {self.concurrency}")
        # the harness promises a single deterministic decode per example
        if self.temperature != 0.0:
            raise ConfigError(f"deterministic decoding requires temperature 0, "
                              f"got {self.temperature}")
        if self.max_new_tokens < 1:
            raise ConfigError(f"max_new_tokens must be >= 1, got {self.max_new_tokens}")
        return self


@dataclass(frozen=True)
class CompletionResult:
    text: str
    attempts: int


def _apply_stop(text: str, stop: tuple[str, ...]) -> str:
    for s in stop:
        if s:
            idx = text.find(s)
            if idx >= 0:
                text = text[:idx]
    return text


def _wire_part(part: dict) -> dict:
    if part["type"] == "image":
        data = base64.b64encode(Path(part["path"]).read_bytes()).decode("ascii")
        return {"type": "image", "data": data}
    return {"type": "text", "text": part["text"]}


def wire_messages(messages: list[dict]) -> list[dict]:
    """Template messages with image parts inlined as base64."""
    return [{"role": m["role"], "content": [_wire_part(p) for p in m["content"]]}
            for m in messages]


class HttpChatClient:
    def __init__(self, cfg: EndpointConfig, transport: httpx.BaseTransport | None = None):
        cfg.validate()
        if not cfg.base_url:
            raise ConfigError("HttpChatClient requires a base_url")
        self.cfg = cfg
        headers = {}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._client = httpx.Client(timeout=cfg.timeout_s, headers=headers,
                                    transport=transport)
        self._url = cfg.base_url.rstrip("/") + CHAT_PATH

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "HttpChatClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _parse(self, resp: httpx.Response) -> str:
        try:
            data = resp.json()
            content = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise EndpointError(f"malformed endpoint response: {e}") from e
        if not isinstance(content, str):
            raise EndpointError(f"endpoint content is {type(content).__name__}, not str")
        return content

    def complete(self, messages: list[dict]) -> CompletionResult:
        payload = {
            "model": self.cfg.model,
            "messages": wire_messages(messages),
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_new_tokens,
            "stop": list(self.cfg.stop),
        }
        last_error: Exception | None = None
        attempts = 0
        while attempts < self.cfg.max_retries + 1:
            attempts += 1
            try:
                resp = self._client.post(self._url, json=payload)
            except httpx.TransportError as e:
                last_error = e
                continue
            if resp.status_code >= 500:
                last_error = EndpointError(f"endpoint returned {resp.status_code}")
                continue
            if resp.status_code != 200:
                # 4xx is a request problem; retrying cannot fix it
                raise EndpointError(
                    f"endpoint returned {resp.status_code}: {resp.text[:200]}")
            text = _apply_stop(self._parse(resp), self.cfg.stop)
            return CompletionResult(text=text, attempts=attempts)
        raise EndpointError(
            f"transport failed after {attempts} attempts: {last_error}")


class LocalChatClient:
    """Greedy decoding against a checkpoint loaded in-process.

    Messages are flattened to "role: content" lines with image markers
    inline, mirroring the plain-text dialogues the model was trained on.
    """

    def __init__(self, checkpoint_path: str | Path, cfg: EndpointConfig | None = None):
        self.cfg = (cfg if cfg is not None else EndpointConfig()).validate()
        params, config, _meta = load_checkpoint(checkpoint_path)
        self.model = MedVlm(config, params)

    def _flatten(self, messages: list[dict]) -> tuple[str, list]:
        lines: list[str] = []
        images: list = []
        for m in messages:
            bits: list[str] = []
            for part in m["content"]:
                if part["type"] == "image":
                    images.append(read_ppm(part["path"]))
                    bits.append(IMAGE_MARKER)
                else:
                    bits.append(part["text"])
            lines.append(f"{m['role']}: " + "\n".join(bits))
        return "\n".join(lines) + "\nassistant:", images

    def complete(self, messages: list[dict]) -> CompletionResult:
        prompt, images = self._flatten(messages)
        text = self.model.generate_text(prompt, images,
                                        max_new_tokens=self.cfg.max_new_tokens)
        return CompletionResult(text=_apply_stop(text, self.cfg.stop), attempts=1)

    def close(self) -> None:
        pass
