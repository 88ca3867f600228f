"""Deterministic mock providers for offline runs and tests.

Mocks are seeded-hash based so outputs are reproducible across machines.
Audio payloads use the `mock://spk/<speaker>/<tag>?t=<b64>` convention:
the speaker segment drives the mock speaker embedder and the `t` query
parameter carries the utterance text so the mock transcriber can act as
an identity ASR.
"""

from __future__ import annotations

import base64
import hashlib
import json
import random
import re
from collections import deque
from pathlib import Path

import numpy as np

from .. import textmetrics
from .base import (
    AudioClip,
    ChatRequest,
    EmptyCompletionError,
    ProviderError,
    SynthesisRefusedError,
    unit_normalize,
)


def _digest(*parts: str) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return h.digest()


def _seeded_rng(*parts: str) -> random.Random:
    return random.Random(int.from_bytes(_digest(*parts)[:8], "big"))


def encode_mock_payload(speaker_id: str, tag: str, transcript: str | None = None) -> str:
    """Build a mock audio payload reference carrying speaker id and transcript."""
    payload = f"mock://spk/{speaker_id}/{tag}"
    if transcript is not None:
        token = base64.urlsafe_b64encode(transcript.encode("utf-8")).decode("ascii")
        payload += f"?t={token}"
    return payload


def payload_speaker(payload: str) -> str | None:
    match = re.match(r"mock://spk/([^/?]+)/", payload)
    return match.group(1) if match else None


def payload_transcript(payload: str) -> str | None:
    match = re.search(r"[?&]t=([A-Za-z0-9_=-]+)", payload)
    if not match:
        return None
    return base64.urlsafe_b64decode(match.group(1).encode("ascii")).decode("utf-8")


class HashEmbedder:
    """Bag-of-tokens embedding backed by per-token seeded gaussian vectors.

    Identical texts map to identical vectors; texts sharing tokens get
    graded similarity, which keeps threshold-based dedup and matching
    meaningful without a real model.
    """

    def __init__(self, dim: int = 64, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            rng = np.random.default_rng(int.from_bytes(_digest(str(self.seed), token)[:8], "big"))
            vec = rng.standard_normal(self.dim)
            self._token_cache[token] = vec
        return vec

    def embed(self, text: str) -> np.ndarray:
        tokens = textmetrics.tokenize(text)
        if not tokens:
            raise ValueError("cannot embed empty text")
        total = np.zeros(self.dim)
        for token in tokens:
            total += self._token_vector(token)
        return unit_normalize(total)


class FixedEmbedder:
    """Maps exact texts to preset vectors; used for boundary fixtures.

    Vectors are returned as given (no re-normalization) so tests control
    the similarity arithmetic bit-for-bit.
    """

    def __init__(self, vectors: dict[str, object]):
        self._vectors = {text: np.asarray(vec, dtype=float) for text, vec in vectors.items()}

    def embed(self, text: str) -> np.ndarray:
        if text not in self._vectors:
            raise KeyError(f"no fixed vector for text: {text!r}")
        return self._vectors[text]


class ScriptedChatProvider:
    """Chat mock answering from a fixture script.

    Entries with a request match on the exact (system, user) prompt pair;
    entries without one are consumed in order. JSONL fixture files hold one
    request/response pair per line.
    """

    def __init__(self, responses=(), keyed: dict[tuple[str, str], str] | None = None):
        self.queue = deque(responses)
        self.keyed = dict(keyed or {})
        self.calls: list[ChatRequest] = []

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedChatProvider":
        queue: list[str] = []
        keyed: dict[tuple[str, str], str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                request = entry.get("request")
                if request:
                    keyed[(request["system_prompt"], request["user_prompt"])] = entry["response"]
                else:
                    queue.append(entry["response"])
        return cls(responses=queue, keyed=keyed)

    def chat_complete(self, req: ChatRequest) -> str:
        self.calls.append(req)
        key = (req.system_prompt, req.user_prompt)
        if key in self.keyed:
            return self.keyed[key]
        if self.queue:
            return self.queue.popleft()
        raise KeyError("scripted chat provider has no response for this request")


class FlakyProvider:
    """Wraps a chat provider, failing the first `failures` calls."""

    def __init__(self, inner, failures: int, error_factory=None):
        from .base import TransportError

        self.inner = inner
        self.remaining = failures
        self.error_factory = error_factory or (lambda: TransportError("injected fault"))

    def chat_complete(self, req: ChatRequest) -> str:
        if self.remaining > 0:
            self.remaining -= 1
            raise self.error_factory()
        return self.inner.chat_complete(req)


class IdentityTranscriber:
    """Returns the transcript embedded in a mock payload; empty otherwise."""

    def transcribe(self, audio: AudioClip, language_hint: str = "") -> str:
        if audio.duration <= 0:
            raise ValueError("audio duration must be > 0")
        return payload_transcript(audio.payload) or ""


class SubstitutingTranscriber:
    """Identity transcription with every nth token replaced, for WER control."""

    def __init__(self, every_nth: int, replacement: str = "subx"):
        if every_nth < 1:
            raise ValueError("every_nth must be >= 1")
        self.every_nth = every_nth
        self.replacement = replacement
        self._inner = IdentityTranscriber()

    def transcribe(self, audio: AudioClip, language_hint: str = "") -> str:
        words = self._inner.transcribe(audio, language_hint).split()
        for i in range(self.every_nth - 1, len(words), self.every_nth):
            words[i] = self.replacement
        return " ".join(words)


class MockSynthesizer:
    """Emits a clip whose duration tracks text length; voice follows the reference."""

    def synthesize(self, text: str, reference: AudioClip) -> AudioClip:
        if not text.strip():
            raise SynthesisRefusedError("cannot synthesize empty text")
        speaker = payload_speaker(reference.payload) or "anon"
        tag = "synth-" + _digest(text, reference.payload).hex()[:12]
        return AudioClip(
            payload=encode_mock_payload(speaker, tag, transcript=text),
            duration=max(0.5, round(0.055 * len(text), 3)),
            sample_rate=reference.sample_rate,
        )


class MockSpeakerEmbedder:
    """Speaker vector keyed on the payload's speaker segment."""

    def __init__(self, dim: int = 32, seed: int = 0):
        self.dim = dim
        self.seed = seed

    def speaker_embed(self, audio: AudioClip) -> np.ndarray:
        if audio.duration <= 0:
            raise ValueError("audio duration must be > 0")
        key = payload_speaker(audio.payload) or audio.payload
        rng = np.random.default_rng(int.from_bytes(_digest("spk", str(self.seed), key)[:8], "big"))
        return unit_normalize(rng.standard_normal(self.dim))


class ConstantQualityPredictor:
    """Returns a fixed MOS-like score, clamped to [1, 5]."""

    def __init__(self, score: float = 3.6):
        self.score = score

    def predict_quality(self, audio: AudioClip) -> float:
        if audio.duration <= 0:
            raise ValueError("audio duration must be > 0")
        return min(5.0, max(1.0, self.score))


_TOPIC_QUALIFIERS = [
    "basics",
    "pricing questions",
    "troubleshooting",
    "requirements",
    "comparisons",
    "scheduling",
    "cancellations",
    "paperwork",
    "support options",
    "common issues",
    "first steps",
    "renewals",
]

_SCENARIO_TEMPLATES = [
    "A customer wants to get started with {t} and needs the first steps.",
    "A parent needs advice about {t} for their child this week.",
    "A traveler is comparing options for {t} before a trip abroad.",
    "A student asks how {t} works and what it usually costs.",
    "Someone wants to fix a recurring problem with {t} quickly.",
    "A new user is confused by {t} and asks for a simple walkthrough.",
    "A small business owner needs {t} arranged before the end of the month.",
    "An elderly relative needs patient guidance on {t} over the phone.",
    "A commuter wants to handle {t} during a short lunch break.",
    "A couple is planning around {t} for an upcoming family event.",
    "A job seeker must sort out {t} before an interview next week.",
    "A volunteer organizes {t} for a community group this weekend.",
]

_FILLER_SENTENCES = [
    "In the evenings I cook something simple and tidy the kitchen.",
    "On weekends I visit the market near my street and catch up with neighbors.",
    "I keep a small notebook where I write lists for the week ahead.",
    "When the weather is kind I prefer to walk instead of taking the bus.",
    "I try to call my relatives once a week to hear their news.",
    "A quiet cup of tea in the afternoon keeps me going.",
    "I save a little money each month for small repairs at home.",
    "I enjoy listening to the radio while doing chores around the house.",
]

_MSA_USER_LINES = [
    "مرحبًا، أحتاج إلى مساعدة بخصوص هذا الأمر من فضلك.",
    "هل يمكنك توضيح الخطوة الأولى بالتفصيل؟",
    "فهمت ذلك، وماذا عن التكلفة المتوقعة؟",
    "هذا مفيد جدًا، هل توجد شروط إضافية يجب معرفتها؟",
    "شكرًا جزيلًا لك على المساعدة القيمة.",
]

_MSA_ASSISTANT_LINES = [
    "أهلًا بك، يسعدني مساعدتك اليوم، تفضل بسؤالك.",
    "بالتأكيد، الخطوة الأولى هي تجهيز المستندات المطلوبة ثم تأكيد الطلب.",
    "التكلفة تعتمد على الخيار الذي تختاره، وسأشرح الفروق الآن.",
    "نعم، هناك شرطان بسيطان وسأذكرهما لك بالترتيب.",
    "على الرحب والسعة، أتمنى لك يومًا سعيدًا.",
]

_EN_USER_LINES = [
    "Hi, I need some help with this request, please.",
    "Could you walk me through the first step in detail?",
    "Got it, and what should I expect the cost to be?",
    "That helps a lot, are there any extra conditions I should know?",
    "Thank you so much for the clear guidance.",
]

_EN_ASSISTANT_LINES = [
    "Hello, happy to help you today, go ahead with your question.",
    "Of course, the first step is preparing the required documents and confirming the request.",
    "The cost depends on the option you pick, and I will explain the differences now.",
    "Yes, there are two simple conditions and I will list them in order.",
    "You are welcome, have a great day.",
]


class AutoPilotChat:
    """Prompt-aware chat mock that emits schema-compliant pipeline outputs.

    Recognizes the pipeline's prompt families (persona summaries, topic and
    scenario generation, dialogue role-play, rubric verdicts, answer rating)
    and produces deterministic, constraint-respecting responses so the full
    pipeline can run offline.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.calls: list[ChatRequest] = []

    def chat_complete(self, req: ChatRequest) -> str:
        self.calls.append(req)
        system, user = req.system_prompt, req.user_prompt
        if "Persona Profiler" in system:
            return self._persona_summary(user)
        if 'single key "topics"' in user:
            return self._topics(user)
        if "conversational scenarios" in user:
            return self._scenarios(user)
        if "USER INFORMATION (Persona):" in user:
            return self._dialogue(user)
        if '"safety_appropriateness"' in system or '"safety_appropriateness"' in user:
            return json.dumps(
                {
                    "relevance": True,
                    "completeness": True,
                    "specificity_actionability": True,
                    "coherence": True,
                    "context_tracking": True,
                    "calibration": True,
                    "language_tone_match": True,
                    "safety_appropriateness": True,
                }
            )
        if "Rating: [[X]]" in system or "Rating: [[X]]" in user:
            return "Rating: [[8]]"
        raise EmptyCompletionError("autopilot mock does not recognize this prompt")

    def _persona_summary(self, user_prompt: str) -> str:
        marker = "Input JSON:"
        idx = user_prompt.find(marker)
        attrs = json.loads(user_prompt[idx + len(marker):]) if idx >= 0 else {}
        name = attrs.get("persona_name", "Sara Haddad")
        age = attrs.get("speaker_age", 30)
        city = attrs.get("city", "the city")
        nationality = attrs.get("speaker_nationality", "local")
        tongue = attrs.get("speaker_mother_tongue", "Arabic")
        profession = attrs.get("profession", "clerk")
        education = attrs.get("education_level", "secondary school")
        marital = attrs.get("marital_status", "single")
        household = attrs.get("household_type", "family household")
        digital = attrs.get("digital_access", {}) or {}
        device = digital.get("device", "smartphone")
        connectivity = digital.get("connectivity", "mobile data")
        ai_level = digital.get("ai_competence_level", "basic")
        use_cases = list(attrs.get("ai_use_case", []) or ["translation", "news summaries"])
        religion = attrs.get("religion")

        sentences = [
            f"My name is {name} and I am {age} years old, living in {city} as a {nationality} resident.",
            f"I grew up speaking {tongue} and it is still the language of my home.",
            f"I work as a {profession} and I completed {education} studies.",
            f"I am {marital} and my days unfold in a {household}.",
            f"I usually go online with my {device} on {connectivity}, and I would describe myself as {ai_level} with new tools.",
            f"Most days I lean on small digital helpers for {use_cases[0]} and for {use_cases[-1]}.",
        ]
        if religion:
            sentences.append(f"My faith is {religion} and it shapes my quiet weekly rhythm.")
        sentences.append("Every morning I take a short walk before the day gets busy.")

        rng = _seeded_rng(str(self.seed), "summary", str(name), str(age))
        fillers = rng.sample(_FILLER_SENTENCES, k=len(_FILLER_SENTENCES))
        text = " ".join(sentences)
        for filler in fillers:
            if textmetrics.count_words(text) >= 95:
                break
            text += " " + filler
        ending = "Next on my list is a routine errand in town that I want to finish this week."
        if textmetrics.count_words(text + " " + ending) <= 178:
            text += " " + ending
        return json.dumps({"summary_first_person": text})

    def _topics(self, user_prompt: str) -> str:
        count = int(re.search(r"Generate exactly (\d+)", user_prompt).group(1))
        domain_match = re.search(r'Domain: "([^"]+)"', user_prompt)
        leaf = (domain_match.group(1).split(">")[-1].strip() if domain_match else "general").lower()
        leaf = re.sub(r"[^\w\s-]", "", leaf)
        topics = []
        for i in range(count):
            qualifier = _TOPIC_QUALIFIERS[i % len(_TOPIC_QUALIFIERS)]
            suffix = "" if i < len(_TOPIC_QUALIFIERS) else f" {i}"
            topics.append(f"{leaf} {qualifier}{suffix}")
        return json.dumps({"topics": topics})

    def _scenarios(self, user_prompt: str) -> str:
        count = int(re.search(r"Generate (\d+) realistic", user_prompt).group(1))
        topic_match = re.search(r'Topic: "([^"]+)"', user_prompt)
        topic = topic_match.group(1) if topic_match else "the task"
        rng = _seeded_rng(str(self.seed), "scenarios", topic)
        order = rng.sample(range(len(_SCENARIO_TEMPLATES)), k=len(_SCENARIO_TEMPLATES))
        scenarios = []
        for i in range(count):
            template = _SCENARIO_TEMPLATES[order[i % len(order)]]
            suffix = "" if i < len(order) else f" (case {i})"
            scenarios.append(template.format(t=topic) + suffix)
        return json.dumps(scenarios)

    def _dialogue(self, user_prompt: str) -> str:
        max_match = re.search(r"Maximum (\d+) messages", user_prompt)
        max_messages = int(max_match.group(1)) if max_match else 8
        arabic = "Modern Standard Arabic" in user_prompt or "Arabic" in user_prompt
        user_lines = _MSA_USER_LINES if arabic else _EN_USER_LINES
        assistant_lines = _MSA_ASSISTANT_LINES if arabic else _EN_ASSISTANT_LINES

        rng = _seeded_rng(str(self.seed), "dialogue", user_prompt)
        n_messages = min(max_messages, 4 + rng.randrange(0, max(1, max_messages - 3)))
        user_starts = rng.random() < 0.55
        messages = []
        for i in range(n_messages):
            user_turn = (i % 2 == 0) == user_starts
            pool = user_lines if user_turn else assistant_lines
            messages.append(
                {"role": "user" if user_turn else "assistant", "content": pool[(i // 2) % len(pool)]}
            )
        return json.dumps({"messages": messages}, ensure_ascii=False)


class EchoDialogueModel:
    """Model-under-test mock: responds deterministically to the last user turn."""

    def __init__(self, name: str = "mock-audio"):
        self.name = name

    def respond(self, messages) -> str:
        last_user = ""
        for message in reversed(messages):
            if message.role == "user":
                last_user = message.content or payload_transcript(message.audio or "") or ""
                break
        digest = _digest("echo", self.name, last_user).hex()[:8]
        return f"Understood, here is my guidance on that ({digest})."
