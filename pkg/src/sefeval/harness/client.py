"""Inference transports: live chat-completions HTTP client with retry,
plus record/replay variants for GPU-free reproduction."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path

import httpx

from ..errors import EndpointError, MalformedResponseError, ReplayMissError, TransportFailure

logger = logging.getLogger(__name__)

API_KEY_ENV = "SEFEVAL_API_KEY"
BASE_URL_ENV = "SEFEVAL_BASE_URL"

_RETRY_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0
    max_retries: int = 3
    parallel: int = 1
    api_key: str | None = None

    def with_env_overrides(self) -> "EndpointConfig":
        cfg = self
        if os.environ.get(BASE_URL_ENV):
            cfg = replace(cfg, base_url=os.environ[BASE_URL_ENV])
        if cfg.api_key is None and os.environ.get(API_KEY_ENV):
            cfg = replace(cfg, api_key=os.environ[API_KEY_ENV])
        return cfg


def transcript_key(model: str, prompt: str) -> str:
    digest = hashlib.sha256()
    digest.update(model.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.encode("utf-8"))
    return digest.hexdigest()


class HttpChatTransport:
    """Single-turn chat completions against an OpenAI-style HTTP endpoint.

    Each prompt goes out as one user message. Transport errors and
    retryable statuses back off exponentially up to ``max_retries``
    additional attempts; anything else fails the request immediately.
    """

    def __init__(self, config: EndpointConfig, backoff_base: float = 0.5):
        self.config = config.with_env_overrides()
        self.backoff_base = backoff_base
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        self._client = httpx.Client(
            base_url=self.config.base_url.rstrip("/"),
            headers=headers,
            timeout=self.config.timeout,
        )

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                delay = self.backoff_base * (2 ** (attempt - 1))
                logger.debug("retrying after %.2fs (attempt %d/%d)", delay, attempt + 1, attempts)
                time.sleep(delay)
            try:
                response = self._client.post("/chat/completions", json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code in _RETRY_STATUS:
                last_error = EndpointError(f"endpoint returned {response.status_code}")
                continue
            if response.status_code != 200:
                raise EndpointError(f"endpoint returned {response.status_code}: {response.text[:200]}")
            return _extract_content(response)
        raise TransportFailure(f"retries exhausted ({attempts} attempts): {last_error}")

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def _extract_content(response: httpx.Response) -> str:
    try:
        body = response.json()
        content = body["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError):
        raise MalformedResponseError(f"unexpected payload: {response.text[:200]}")
    if not isinstance(content, str):
        raise MalformedResponseError("completion content is not a string")
    return content


class ReplayTransport:
    """Serve completions from a recorded transcript, keyed by
    sha256(model, prompt). Later duplicates of a key win."""

    def __init__(self, path: str | Path, model: str):
        self.path = Path(path)
        self.model = model
        self._responses: dict[str, str] = {}
        if not self.path.exists():
            raise EndpointError(f"replay transcript not found: {self.path}")
        with self.path.open(encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                    self._responses[entry["key"]] = entry["response"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    raise EndpointError(f"bad transcript entry at {self.path}:{lineno}")

    def complete(self, prompt: str) -> str:
        key = transcript_key(self.model, prompt)
        try:
            return self._responses[key]
        except KeyError:
            raise ReplayMissError(
                f"no transcript entry for prompt (key {key[:12]}..., prompt starts {prompt[:60]!r})"
            )

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        pass


class RecordingTransport:
    """Wrap a live transport and persist every exchange to a transcript."""

    def __init__(self, inner, model: str, path: str | Path):
        self.inner = inner
        self.model = model
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = self.path.open("a", encoding="utf-8")

    def complete(self, prompt: str) -> str:
        response = self.inner.complete(prompt)
        entry = {
            "key": transcript_key(self.model, prompt),
            "model": self.model,
            "prompt": prompt,
            "response": response,
        }
        self._handle.write(json.dumps(entry, ensure_ascii=False) + "\n")
        self._handle.flush()
        return response

    def close(self):
        self._handle.close()
        self.inner.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
