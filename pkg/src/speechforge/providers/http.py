"""Thin HTTP clients for configured model endpoints.

One generic JSON POST convention per provider type; endpoints and model
names come from config, credentials from environment variables. Retryable
transport conditions (connection errors, 429, 5xx) surface as the retry
policy's error categories.
"""

from __future__ import annotations

import os
from typing import Callable

import numpy as np
import requests

from .base import (
    AudioClip,
    ChatRequest,
    EmptyCompletionError,
    ProviderError,
    RateLimitError,
    TransportError,
    call_with_retries,
    unit_normalize,
)


def _default_post(url: str, payload: dict, headers: dict, timeout: float) -> dict:
    try:
        response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(str(exc)) from exc
    if response.status_code == 429:
        raise RateLimitError(f"rate limited by {url}")
    if response.status_code >= 500:
        raise TransportError(f"{url} returned {response.status_code}")
    if response.status_code >= 400:
        raise ProviderError(f"{url} returned {response.status_code}: {response.text[:200]}")
    return response.json()


class _HttpBase:
    def __init__(
        self,
        endpoint: str,
        model: str = "",
        api_key_env: str = "",
        timeout: float = 60.0,
        post: Callable[[str, dict, dict, float], dict] | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self._post = post or _default_post

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise ProviderError(f"credential env var {self.api_key_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _call(self, payload: dict) -> dict:
        return call_with_retries(lambda: self._post(self.endpoint, payload, self._headers(), self.timeout))


class HttpChatProvider(_HttpBase):
    """OpenAI-style chat completion endpoint."""

    def chat_complete(self, req: ChatRequest) -> str:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": req.system_prompt},
                {"role": "user", "content": req.user_prompt},
            ],
            "temperature": req.decoding.temperature,
            "max_tokens": req.decoding.max_output_tokens,
        }
        data = self._call(payload)
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected chat response shape: {exc}") from exc
        if not text:
            raise EmptyCompletionError("provider returned an empty completion")
        return text


class HttpEmbeddingProvider(_HttpBase):
    """OpenAI-style embedding endpoint; vectors are unit-normalized."""

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise ValueError("cannot embed empty text")
        data = self._call({"model": self.model, "input": text})
        try:
            values = data["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected embedding response shape: {exc}") from exc
        return unit_normalize(values)


class HttpTranscriptionProvider(_HttpBase):
    """Generic transcription endpoint: posts the payload reference."""

    def transcribe(self, audio: AudioClip, language_hint: str = "") -> str:
        data = self._call({"model": self.model, "audio": audio.payload, "language": language_hint})
        return str(data.get("text", ""))


class HttpSynthesisProvider(_HttpBase):
    """Generic synthesis endpoint: returns a payload reference plus duration."""

    def synthesize(self, text: str, reference: AudioClip) -> AudioClip:
        if not text.strip():
            raise ValueError("cannot synthesize empty text")
        data = self._call({"model": self.model, "text": text, "reference": reference.payload})
        return AudioClip(
            payload=str(data["audio"]),
            duration=float(data.get("duration", 0.0)) or 0.001,
            sample_rate=int(data.get("sample_rate", reference.sample_rate)),
        )


class HttpSpeakerEmbeddingProvider(_HttpBase):
    def speaker_embed(self, audio: AudioClip) -> np.ndarray:
        data = self._call({"model": self.model, "audio": audio.payload})
        return unit_normalize(data["embedding"])


class HttpQualityPredictor(_HttpBase):
    def predict_quality(self, audio: AudioClip) -> float:
        data = self._call({"model": self.model, "audio": audio.payload})
        return min(5.0, max(1.0, float(data["score"])))
