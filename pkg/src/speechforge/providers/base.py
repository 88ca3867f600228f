"""Provider interfaces for external model services.

All model calls in the pipeline flow through these protocols: chat
completion, text embedding, transcription, speech synthesis, speaker
embedding, and perceptual quality prediction. Provider identity (model
name, endpoint) is configuration, never code; every protocol has a
deterministic mock in `speechforge.providers.mocks`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

import numpy as np


class ProviderError(Exception):
    """Base class for provider failures. `retryable` drives the retry policy."""

    retryable = False


class TransportError(ProviderError):
    """Network/timeout failure reaching the provider; safe to retry."""

    retryable = True


class RateLimitError(TransportError):
    """Provider signalled throttling; retry after backoff."""


class EmptyCompletionError(ProviderError):
    """Chat provider returned an empty completion."""


class SynthesisRefusedError(ProviderError):
    """Synthesis provider declined to render the requested text."""


class UnsupportedLanguageError(ProviderError):
    """Transcription provider does not handle the requested language hint."""


@dataclass(frozen=True)
class Decoding:
    """Decoding parameters carried on every chat request."""

    temperature: float = 0.7
    max_output_tokens: int = 1024

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")


@dataclass(frozen=True)
class ChatRequest:
    """A single system+user prompt pair sent to a chat provider."""

    system_prompt: str
    user_prompt: str
    decoding: Decoding = field(default_factory=Decoding)

    def __post_init__(self) -> None:
        if not self.system_prompt.strip():
            raise ValueError("system_prompt must be non-empty")
        if not self.user_prompt.strip():
            raise ValueError("user_prompt must be non-empty")


@dataclass(frozen=True)
class AudioClip:
    """Opaque audio payload reference; no samples are handled in-process."""

    payload: str
    duration: float
    sample_rate: int = 16000

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be > 0")


def unit_normalize(values) -> np.ndarray:
    """Scale a vector to unit Euclidean norm. Raises on the zero vector."""
    vec = np.asarray(values, dtype=float)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return vec / norm


@runtime_checkable
class ChatProvider(Protocol):
    def chat_complete(self, req: ChatRequest) -> str:
        """Return the raw completion text; no parsing happens here."""
        ...


@runtime_checkable
class EmbeddingProvider(Protocol):
    def embed(self, text: str) -> np.ndarray:
        """Return a unit-norm vector; deterministic for identical input."""
        ...


@runtime_checkable
class TranscriptionProvider(Protocol):
    def transcribe(self, audio: AudioClip, language_hint: str = "") -> str:
        """Return a hypothesis transcript, possibly empty."""
        ...


@runtime_checkable
class SynthesisProvider(Protocol):
    def synthesize(self, text: str, reference: AudioClip) -> AudioClip:
        """Render text in the reference clip's voice."""
        ...


@runtime_checkable
class SpeakerEmbeddingProvider(Protocol):
    def speaker_embed(self, audio: AudioClip) -> np.ndarray:
        """Return a unit-norm speaker-identity vector."""
        ...


@runtime_checkable
class QualityPredictor(Protocol):
    def predict_quality(self, audio: AudioClip) -> float:
        """Return a MOS-like perceptual quality score clamped to [1, 5]."""
        ...


RETRY_ATTEMPTS = 3
RETRY_BASE_DELAY = 1.0


def call_with_retries(
    fn: Callable[[], str],
    attempts: int = RETRY_ATTEMPTS,
    base_delay: float = RETRY_BASE_DELAY,
    sleep: Callable[[float], None] = time.sleep,
):
    """Run fn, retrying retryable provider errors with exponential backoff.

    Providers are side-effect-free, so retrying never duplicates work.
    Non-retryable errors propagate immediately.
    """
    delay = base_delay
    for attempt in range(1, attempts + 1):
        try:
            return fn()
        except ProviderError as exc:
            if not exc.retryable or attempt == attempts:
                raise
            sleep(delay)
            delay *= 2
    raise AssertionError("unreachable")
