"""Reference speech bank: ingestion, transcription-quality filtering,
per-speaker segment selection, and bank statistics reports.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence

from . import textmetrics
from .providers.base import AudioClip, ProviderError

VARIANTS = ("MSA", "English", "Gulf", "Egyptian", "North African", "Levantine", "other")

AGE_GROUPS = (("<20", 0, 19), ("20-29", 20, 29), ("30-39", 30, 39), ("40-49", 40, 49), ("50-59", 50, 59), ("60+", 60, 999))


@dataclass(frozen=True)
class SpeakerProfile:
    speaker_id: str
    country: str
    mother_tongue: str
    gender: str
    age: int | None = None
    education_level: str | None = None
    variants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.age is not None and self.age <= 0:
            raise ValueError("age must be > 0 when present")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SpeakerProfile":
        data = dict(data)
        data["variants"] = tuple(data.get("variants") or ())
        return cls(**data)


@dataclass(frozen=True)
class UtteranceRecord:
    utterance_id: str
    speaker_id: str
    variant: str
    duration: float
    audio: AudioClip
    transcript: str | None = None
    source: str = ""
    wer: float | None = None

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "UtteranceRecord":
        data = dict(data)
        data["audio"] = AudioClip(**data["audio"])
        return cls(**data)


@dataclass(frozen=True)
class RowError:
    index: int
    reason: str


@dataclass(frozen=True)
class Exclusion:
    utterance_id: str
    reason: str
    wer: float | None = None


def ingest(
    rows: Iterable[dict],
    source_config: dict,
    variants: Sequence[str] = VARIANTS,
) -> tuple[list[UtteranceRecord], list[RowError]]:
    """Normalize raw source rows into utterance records.

    `source_config` declares the column mapping ({"columns": {field: column}})
    plus optional defaults. Bad rows are collected into the error report, not
    fatal; duplicate utterance ids are rejected as conflicts.
    """
    columns = source_config.get("columns", {})
    defaults = source_config.get("defaults", {})
    source = source_config.get("source", "")
    variant_set = set(variants)

    def pick(row: dict, fld: str):
        column = columns.get(fld, fld)
        value = row.get(column)
        if value is None or value == "":
            return defaults.get(fld)
        return value

    records: list[UtteranceRecord] = []
    errors: list[RowError] = []
    seen_ids: set[str] = set()
    for index, row in enumerate(rows):
        utt_id = pick(row, "utterance_id")
        spk_id = pick(row, "speaker_id")
        variant = pick(row, "variant")
        duration = pick(row, "duration")
        payload = pick(row, "audio")
        if not utt_id or not spk_id:
            errors.append(RowError(index, "missing utterance_id or speaker_id"))
            continue
        if utt_id in seen_ids:
            errors.append(RowError(index, f"duplicate utterance_id {utt_id}"))
            continue
        if variant not in variant_set:
            errors.append(RowError(index, f"variant {variant!r} not in configured inventory"))
            continue
        try:
            duration = float(duration)
        except (TypeError, ValueError):
            errors.append(RowError(index, "missing or non-numeric duration"))
            continue
        if duration <= 0:
            errors.append(RowError(index, "duration must be > 0"))
            continue
        if not payload:
            errors.append(RowError(index, "missing audio payload reference"))
            continue
        transcript = pick(row, "transcript")
        sample_rate = pick(row, "sample_rate") or 16000
        records.append(
            UtteranceRecord(
                utterance_id=str(utt_id),
                speaker_id=str(spk_id),
                variant=str(variant),
                duration=duration,
                audio=AudioClip(payload=str(payload), duration=duration, sample_rate=int(sample_rate)),
                transcript=str(transcript) if transcript is not None else None,
                source=str(source),
            )
        )
        seen_ids.add(str(utt_id))
    return records, errors


def filter_by_wer(
    records: Iterable[UtteranceRecord],
    transcriber,
    max_wer: float = 0.05,
    language_hint: str = "",
) -> tuple[list[UtteranceRecord], list[Exclusion]]:
    """Keep records whose reference transcript the transcriber reproduces
    within the WER gate (inclusive). Records without a transcript, or whose
    transcription call fails, are excluded rather than retained unverified.
    """
    retained: list[UtteranceRecord] = []
    excluded: list[Exclusion] = []
    for record in records:
        if not record.transcript:
            excluded.append(Exclusion(record.utterance_id, "no-reference"))
            continue
        try:
            hypothesis = transcriber.transcribe(record.audio, language_hint)
        except (ProviderError, ValueError) as exc:
            excluded.append(Exclusion(record.utterance_id, f"unverified: {exc}"))
            continue
        reference_tokens = textmetrics.tokenize(record.transcript, mode="wer")
        if not reference_tokens:
            excluded.append(Exclusion(record.utterance_id, "no-reference"))
            continue
        score = textmetrics.wer(reference_tokens, textmetrics.tokenize(hypothesis, mode="wer"))
        if score <= max_wer:
            retained.append(dataclasses.replace(record, wer=score))
        else:
            excluded.append(Exclusion(record.utterance_id, "wer-above-threshold", wer=score))
    return retained, excluded


def select_segments(
    records: Sequence[UtteranceRecord],
    n: int = 10,
    duration_range: tuple[float, float] = (5.0, 8.0),
    rng_seed: int = 0,
) -> tuple[list[UtteranceRecord], bool]:
    """Uniformly sample up to n in-range segments of one speaker, without
    replacement. Range endpoints are inclusive. Returns (selection, shortfall).
    """
    speakers = {record.speaker_id for record in records}
    if len(speakers) > 1:
        raise ValueError(f"records span multiple speakers: {sorted(speakers)}")
    lo, hi = duration_range
    qualifying = [record for record in records if lo <= record.duration <= hi]
    qualifying.sort(key=lambda record: record.utterance_id)
    if len(qualifying) <= n:
        return qualifying, len(qualifying) < n
    rng = random.Random(rng_seed)
    return rng.sample(qualifying, n), False


def bank_statistics(records: Sequence[UtteranceRecord], speakers: Sequence[SpeakerProfile]) -> dict:
    """Deterministic aggregation of bank composition.

    Per-variant speaker counts may overlap across variants; the unique
    speaker count is always <= the per-variant sum.
    """
    by_variant: dict[str, dict] = {}
    variant_speakers: dict[str, set] = defaultdict(set)
    variant_durations: dict[str, list[float]] = defaultdict(list)
    for record in records:
        variant_speakers[record.variant].add(record.speaker_id)
        variant_durations[record.variant].append(record.duration)
    for variant in sorted(variant_speakers):
        durations = variant_durations[variant]
        n_spk = len(variant_speakers[variant])
        by_variant[variant] = {
            "speakers": n_spk,
            "utterances": len(durations),
            "utterances_per_speaker": round(len(durations) / n_spk, 1) if n_spk else 0.0,
            "mean_duration_s": round(sum(durations) / len(durations), 1) if durations else 0.0,
        }

    mother_tongue_counts: dict[str, dict] = {}
    utt_by_speaker: dict[str, int] = defaultdict(int)
    for record in records:
        utt_by_speaker[record.speaker_id] += 1
    for speaker in speakers:
        entry = mother_tongue_counts.setdefault(speaker.mother_tongue, {"speakers": 0, "utterances": 0})
        entry["speakers"] += 1
        entry["utterances"] += utt_by_speaker.get(speaker.speaker_id, 0)

    age_histogram = {label: 0 for label, _, _ in AGE_GROUPS}
    for speaker in speakers:
        if speaker.age is None:
            continue
        for label, lo, hi in AGE_GROUPS:
            if lo <= speaker.age <= hi:
                age_histogram[label] += 1
                break

    per_variant_sum = sum(entry["speakers"] for entry in by_variant.values())
    unique_speakers = len({record.speaker_id for record in records})
    report = {
        "per_variant": by_variant,
        "per_variant_speaker_sum": per_variant_sum,
        "unique_speakers": unique_speakers,
        "per_mother_tongue": dict(sorted(mother_tongue_counts.items())),
        "age_histogram": age_histogram,
        "total_utterances": len(list(records)),
        "total_hours": round(sum(record.duration for record in records) / 3600.0, 1),
        "rounding": "means rounded to one decimal",
    }
    if unique_speakers > per_variant_sum:
        raise AssertionError("unique speaker count exceeded per-variant sum")
    return report
