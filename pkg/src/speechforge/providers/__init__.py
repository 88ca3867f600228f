from .base import (
    AudioClip,
    ChatProvider,
    ChatRequest,
    Decoding,
    EmbeddingProvider,
    EmptyCompletionError,
    ProviderError,
    QualityPredictor,
    RateLimitError,
    SpeakerEmbeddingProvider,
    SynthesisProvider,
    SynthesisRefusedError,
    TranscriptionProvider,
    TransportError,
    UnsupportedLanguageError,
    call_with_retries,
    unit_normalize,
)
from .factory import ProviderSet, build_providers

__all__ = [
    "AudioClip",
    "ChatProvider",
    "ChatRequest",
    "Decoding",
    "EmbeddingProvider",
    "EmptyCompletionError",
    "ProviderError",
    "ProviderSet",
    "QualityPredictor",
    "RateLimitError",
    "SpeakerEmbeddingProvider",
    "SynthesisProvider",
    "SynthesisRefusedError",
    "TranscriptionProvider",
    "TransportError",
    "UnsupportedLanguageError",
    "build_providers",
    "call_with_retries",
    "unit_normalize",
]
