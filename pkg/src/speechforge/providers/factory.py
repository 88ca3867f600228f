"""Build provider instances from a configuration mapping."""

from __future__ import annotations

from dataclasses import dataclass

from . import http, mocks


@dataclass
class ProviderSet:
    """Everything a pipeline run needs to talk to model services."""

    chat: object
    embedder: object
    transcriber: object
    synthesizer: object
    speaker_embedder: object
    quality: object


def _build(kind_cfg: dict, role: str, seed: int):
    kind = (kind_cfg or {}).get("kind", "mock")
    if kind == "mock":
        if role == "chat":
            return mocks.AutoPilotChat(seed=seed)
        if role == "embedding":
            return mocks.HashEmbedder(dim=int(kind_cfg.get("dim", 64)), seed=seed)
        if role == "transcriber":
            return mocks.IdentityTranscriber()
        if role == "synthesizer":
            return mocks.MockSynthesizer()
        if role == "speaker_embedder":
            return mocks.MockSpeakerEmbedder(seed=seed)
        if role == "quality":
            return mocks.ConstantQualityPredictor(score=float(kind_cfg.get("score", 3.6)))
    if kind == "scripted" and role == "chat":
        return mocks.ScriptedChatProvider.from_jsonl(kind_cfg["script"])
    if kind == "http":
        common = {
            "endpoint": kind_cfg["endpoint"],
            "model": kind_cfg.get("model", ""),
            "api_key_env": kind_cfg.get("api_key_env", ""),
            "timeout": float(kind_cfg.get("timeout", 60.0)),
        }
        cls = {
            "chat": http.HttpChatProvider,
            "embedding": http.HttpEmbeddingProvider,
            "transcriber": http.HttpTranscriptionProvider,
            "synthesizer": http.HttpSynthesisProvider,
            "speaker_embedder": http.HttpSpeakerEmbeddingProvider,
            "quality": http.HttpQualityPredictor,
        }[role]
        return cls(**common)
    raise ValueError(f"unknown provider kind {kind!r} for role {role!r}")


def build_providers(config: dict | None, seed: int = 0) -> ProviderSet:
    """Instantiate the full provider set; unconfigured roles default to mocks."""
    config = config or {}
    return ProviderSet(
        chat=_build(config.get("chat", {}), "chat", seed),
        embedder=_build(config.get("embedding", {}), "embedding", seed),
        transcriber=_build(config.get("transcriber", {}), "transcriber", seed),
        synthesizer=_build(config.get("synthesizer", {}), "synthesizer", seed),
        speaker_embedder=_build(config.get("speaker_embedder", {}), "speaker_embedder", seed),
        quality=_build(config.get("quality", {}), "quality", seed),
    )
