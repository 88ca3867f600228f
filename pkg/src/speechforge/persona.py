"""Persona construction: seeded and synthetic profile sampling, country-level
value grounding, near-duplicate-rejecting expansion, and first-person summary
generation through a chat provider.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import textmetrics
from .providers.base import ChatProvider, ChatRequest, Decoding
from .refbank import SpeakerProfile

OCEAN_TRAITS = ("openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism")
OCEAN_BASE = 0.5
OCEAN_NOISE_RADIUS = 0.15

SYNTHETIC_AGE_RANGE = (18, 40)
AGE_BUCKETS = (("18-24", 18, 24), ("25-34", 25, 34), ("35-49", 35, 49), ("50plus", 50, 999))
WVS_AGE_BANDS = (("18-29", 0, 29), ("30-49", 30, 49), ("50+", 50, 999))


class InventoryError(ValueError):
    """An inventory required for sampling is missing an entry."""


class SummaryFormatError(ValueError):
    """Summary provider output violated the strict JSON contract."""

    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


@dataclass(frozen=True)
class DigitalAccess:
    device: str
    connectivity: str
    ai_competence_level: str


@dataclass(frozen=True)
class PersonaProfile:
    """Structured attribute record seeding all downstream generation."""

    persona_id: str
    persona_name: str
    age: int
    gender: str
    city: str
    country: str
    speaker_nationality: str
    mother_tongue: str
    education_level: str
    profession: str
    marital_status: str
    household_type: str
    digital_access: DigitalAccess
    ai_use_cases: tuple[str, str]
    ocean: dict[str, float]
    wvs_profile: dict[str, object] = field(default_factory=dict)
    religion: str | None = None
    seed_speaker_id: str | None = None

    def __post_init__(self) -> None:
        if len(set(self.ai_use_cases)) != 2:
            raise ValueError("ai_use_cases must hold exactly 2 distinct items")
        for trait, value in self.ocean.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"ocean trait {trait} out of [0,1]: {value}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PersonaProfile":
        data = dict(data)
        data["digital_access"] = DigitalAccess(**data["digital_access"])
        data["ai_use_cases"] = tuple(data["ai_use_cases"])
        return cls(**data)


@dataclass(frozen=True)
class PersonaSummary:
    """A first-person paragraph; word_count is always recomputed locally."""

    persona_id: str
    text: str
    word_count: int

    @classmethod
    def from_text(cls, persona_id: str, text: str) -> "PersonaSummary":
        return cls(persona_id=persona_id, text=text, word_count=textmetrics.count_words(text))

    @property
    def failed(self) -> bool:
        return not self.text


WvsTable = dict


def _load_data_json(name: str, path: str | Path | None):
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    with resources.files("speechforge.data").joinpath(name).open(encoding="utf-8") as fh:
        return json.load(fh)


def load_inventories(path: str | Path | None = None) -> dict:
    inventories = _load_data_json("inventories.json", path)
    if not inventories.get("countries"):
        raise InventoryError("inventories file declares no countries")
    return inventories


def load_wvs_table(path: str | Path | None = None) -> WvsTable:
    table = _load_data_json("wvs_table.json", path)
    rows = {country: bands for country, bands in table.items() if not country.startswith("_")}
    for country, bands in rows.items():
        if not bands:
            raise ValueError(f"WVS table has no rows for country {country}")
    return rows


def age_bucket(age: int) -> str:
    for label, lo, hi in AGE_BUCKETS:
        if lo <= age <= hi:
            return label
    raise InventoryError(f"no profession bucket covers age {age}")


def wvs_age_band(age: int) -> str:
    for label, lo, hi in WVS_AGE_BANDS:
        if lo <= age <= hi:
            return label
    raise ValueError(f"no WVS age band covers age {age}")


def _pick(rng: random.Random, pool: Sequence, what: str):
    if not pool:
        raise InventoryError(f"inventory is empty: {what}")
    return rng.choice(list(pool))


def sample_persona(
    inventories: dict,
    rng: random.Random,
    persona_id: str,
    seed: SpeakerProfile | None = None,
) -> PersonaProfile:
    """Instantiate a persona, copying seed fields and sampling the rest.

    Seed precedence is absolute: whenever the seed speaker provides a field
    (country, gender, mother tongue, age, education), the persona keeps it.
    Synthetic personas draw age uniformly from 18-40.
    """
    countries = inventories["countries"]
    country = seed.country if seed else _pick(rng, sorted(countries), "countries")
    if country not in countries:
        raise InventoryError(f"no inventory for country {country}")
    country_inv = countries[country]

    gender = seed.gender if seed else _pick(rng, ("male", "female"), "gender")
    age = seed.age if seed and seed.age else rng.randint(*SYNTHETIC_AGE_RANGE)
    name_pool = country_inv.get("names", {}).get(gender)
    if not name_pool:
        raise InventoryError(f"no name inventory for ({country}, {gender})")
    persona_name = _pick(rng, name_pool, f"names[{country}][{gender}]")
    city = _pick(rng, country_inv.get("cities", ()), f"cities[{country}]")
    mother_tongue = (seed.mother_tongue if seed and seed.mother_tongue else country_inv["mother_tongue"])
    education = (
        seed.education_level
        if seed and seed.education_level
        else _pick(rng, inventories["education_levels"], "education_levels")
    )

    bucket = age_bucket(age)
    professions = inventories["professions"].get(bucket)
    if not professions:
        raise InventoryError(f"no profession inventory for age bucket {bucket}")
    profession = _pick(rng, professions, f"professions[{bucket}]")

    marital = _pick(rng, inventories["marital_statuses"], "marital_statuses")
    household = _pick(rng, inventories["household_types"], "household_types")
    religion = _pick(rng, country_inv.get("religions", [None]), f"religions[{country}]")
    access = DigitalAccess(
        device=_pick(rng, inventories["devices"], "devices"),
        connectivity=_pick(rng, inventories["connectivity"], "connectivity"),
        ai_competence_level=_pick(rng, inventories["ai_competence_levels"], "ai_competence_levels"),
    )
    use_cases = tuple(rng.sample(list(inventories["ai_use_cases"]), 2))
    ocean = {
        trait: min(1.0, max(0.0, OCEAN_BASE + rng.uniform(-OCEAN_NOISE_RADIUS, OCEAN_NOISE_RADIUS)))
        for trait in OCEAN_TRAITS
    }

    return PersonaProfile(
        persona_id=persona_id,
        persona_name=persona_name,
        age=age,
        gender=gender,
        city=city,
        country=country,
        speaker_nationality=country_inv["nationality"],
        mother_tongue=mother_tongue,
        education_level=education,
        profession=profession,
        marital_status=marital,
        household_type=household,
        digital_access=access,
        ai_use_cases=use_cases,
        ocean=ocean,
        religion=religion,
        seed_speaker_id=seed.speaker_id if seed else None,
    )


def ground_wvs(profile: PersonaProfile, table: WvsTable) -> PersonaProfile:
    """Populate wvs_profile from the (country, age band) row of the table."""
    if profile.country not in table:
        raise ValueError(f"WVS table has no rows for country {profile.country}")
    bands = table[profile.country]
    band = wvs_age_band(profile.age)
    row = bands.get(band)
    if row is None:
        row = bands[sorted(bands)[0]]
    return replace(profile, wvs_profile=dict(row))


def render_profile(profile: PersonaProfile) -> str:
    """Canonical attribute rendering used as the dedup embedding input.

    Deterministic "field: value" lines sorted by field name.
    """
    flat: dict[str, object] = {
        "age": profile.age,
        "ai_use_cases": ", ".join(sorted(profile.ai_use_cases)),
        "city": profile.city,
        "connectivity": profile.digital_access.connectivity,
        "country": profile.country,
        "device": profile.digital_access.device,
        "ai_competence_level": profile.digital_access.ai_competence_level,
        "education_level": profile.education_level,
        "gender": profile.gender,
        "household_type": profile.household_type,
        "marital_status": profile.marital_status,
        "mother_tongue": profile.mother_tongue,
        "persona_name": profile.persona_name,
        "profession": profile.profession,
        "religion": profile.religion if profile.religion else "none",
        "speaker_nationality": profile.speaker_nationality,
    }
    for trait in OCEAN_TRAITS:
        flat[f"ocean.{trait}"] = f"{profile.ocean[trait]:.3f}"
    for axis in sorted(profile.wvs_profile):
        flat[f"wvs.{axis}"] = profile.wvs_profile[axis]
    return "\n".join(f"{key}: {flat[key]}" for key in sorted(flat))


@dataclass
class ExpansionResult:
    personas: list[PersonaProfile]
    attempts: int
    rejected: int
    budget_exhausted: bool


def expand_seeds(
    seeds: Sequence[PersonaProfile],
    target_count: int,
    embedder,
    candidate_factory: Callable[[random.Random], PersonaProfile],
    reject_threshold: float = 0.80,
    rng: random.Random | None = None,
    attempt_budget: int | None = None,
) -> ExpansionResult:
    """Grow the persona set by sampling candidates and rejecting near-duplicates.

    A candidate is discarded iff its canonical-rendering embedding exceeds
    the threshold cosine against any already-accepted profile (strictly
    greater; a candidate at exactly the threshold is kept). Admission is a
    single serialized loop so the threshold property holds exactly.
    """
    if not seeds:
        raise ValueError("expand_seeds requires at least one seed persona")
    rng = rng or random.Random(0)
    if attempt_budget is None:
        attempt_budget = max(50, 20 * target_count)

    accepted = list(seeds)
    vectors = [embedder.embed(render_profile(p)) for p in accepted]
    attempts = rejected = 0
    while len(accepted) < target_count and attempts < attempt_budget:
        attempts += 1
        candidate = candidate_factory(rng)
        vec = embedder.embed(render_profile(candidate))
        if any(textmetrics.cosine(vec, other) > reject_threshold for other in vectors):
            rejected += 1
            continue
        accepted.append(candidate)
        vectors.append(vec)
    return ExpansionResult(
        personas=accepted,
        attempts=attempts,
        rejected=rejected,
        budget_exhausted=len(accepted) < target_count,
    )


SUMMARY_SYSTEM_PROMPT = """You are a specialized AI "Persona Profiler." Your sole task is to take a single JSON object containing persona attributes and produce a coherent, natural, first-person persona summary.

Input: JSON object with persona attributes (schema below).

Output: strict JSON only:
{"summary_first_person":"<90--180 words>"}

Hard constraints:
- One paragraph. First-person only ("I..."). Natural, grounded tone.
- 90--180 words.
- Opening sentence MUST include: persona_name + speaker_age + (city if present) + speaker_nationality.
- Use ONLY explicit JSON facts. No invention, inference, stereotypes, or extra backstory.
- Do not output IDs (speaker_id, script_id, region) unless user explicitly asks.

Content selection (use if present):
- Identity/core: persona_name, speaker_age, gender (only if it fits naturally), speaker_mother_tongue, city, speaker_nationality.
- Life context: Use marital_status and household_type to describe living arrangements and family situation, ensuring they are mutually consistent.
- Work/education: Use education_level and profession together, ensuring the stated role is plausible and consistent with the education level.
- Digital/AI: Reflect technology access and AI familiarity using digital_access.device, digital_access.connectivity, and digital_access.ai_competence_level; also consider life context, education, and profession.
- AI Use Cases: Integrate them naturally based on the ai_use_case information and other personal attributes. Do not assume enthusiasm for AI---reflect only what the fields support.
- Religion: Mention only if religion exists; keep neutral.
- Include small, ordinary, concrete details (routines, habits, regular activities).
- Interests, activities and hobbies must appear organically within the flow of daily life and they should be consistent with age.

Values/profiles:
- wvs_profile: NEVER mention numbers, axes names, "WVS", or "scores". If used at all, reflect implicitly via everyday preferences/actions. If a value is null, ignore it. Do not "explain" or psychoanalyze.
- ocean: NEVER mention trait names or numbers. Do not write "I am X" traits. If used, show via behavior (e.g., planning habits) without labeling.

Negative/contradictions:
- If conflicts/negatives exist, preserve them plainly; no "growth/lesson" framing.

Ending:
- No abstract/moral reflections ("I've learned...", "In the end..."). End with a routine, near-term goal, or ongoing interest.

Failure rule:
- If you cannot satisfy opening/length/JSON-only, output {"summary_first_person":""}.

Internal self-check before final:
[ ] first-person; [ ] 90--180 words; [ ] opening fields present; [ ] no IDs; [ ] no invented facts;
[ ] no WVS/OCEAN labels or numbers; [ ] no "I am <trait>"; [ ] grounded ending; [ ] strict JSON only.
"""

SUMMARY_USER_TEMPLATE = """Generate a first-person persona summary from the following JSON data consisting of persona attributes.

Input JSON:
{json_object}
"""


def profile_prompt_payload(profile: PersonaProfile) -> dict:
    """Attribute object sent to the summary prompt (no internal ids)."""
    return {
        "persona_name": profile.persona_name,
        "speaker_age": profile.age,
        "gender": profile.gender,
        "city": profile.city,
        "speaker_nationality": profile.speaker_nationality,
        "speaker_mother_tongue": profile.mother_tongue,
        "education_level": profile.education_level,
        "profession": profile.profession,
        "marital_status": profile.marital_status,
        "household_type": profile.household_type,
        "religion": profile.religion,
        "digital_access": asdict(profile.digital_access),
        "ai_use_case": list(profile.ai_use_cases),
        "wvs_profile": profile.wvs_profile,
        "ocean": profile.ocean,
    }


def parse_summary_response(raw: str) -> str:
    """Parse the strict single-key JSON summary object; raise on any deviation."""
    stripped = raw.strip()
    if stripped.startswith("```"):
        raise SummaryFormatError("markdown-fenced", "response is wrapped in a code fence")
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError as exc:
        if "{" in stripped and not stripped.startswith("{"):
            raise SummaryFormatError("surrounding-prose", "JSON object has surrounding text") from exc
        raise SummaryFormatError("invalid-json", f"not a JSON object: {exc}") from exc
    if not isinstance(obj, dict):
        raise SummaryFormatError("wrong-shape", f"expected object, got {type(obj).__name__}")
    if set(obj) != {"summary_first_person"}:
        raise SummaryFormatError("extra-keys", f"unexpected keys: {sorted(set(obj) - {'summary_first_person'})}")
    value = obj["summary_first_person"]
    if not isinstance(value, str):
        raise SummaryFormatError("wrong-shape", "summary_first_person must be a string")
    return value


def summarize(
    profile: PersonaProfile,
    chat: ChatProvider,
    retries: int = 3,
    decoding: Decoding | None = None,
) -> PersonaSummary:
    """Generate the persona's first-person summary via the chat provider.

    An empty summary string is the provider's declared failure signal and is
    returned as-is (callers flag it); malformed output is retried up to
    `retries` times, then the last format error propagates.
    """
    payload = json.dumps(profile_prompt_payload(profile), ensure_ascii=False, sort_keys=True)
    request = ChatRequest(
        system_prompt=SUMMARY_SYSTEM_PROMPT,
        user_prompt=SUMMARY_USER_TEMPLATE.format(json_object=payload),
        decoding=decoding or Decoding(),
    )
    last_error: SummaryFormatError | None = None
    for _ in range(retries + 1):
        raw = chat.chat_complete(request)
        try:
            text = parse_summary_response(raw)
        except SummaryFormatError as exc:
            last_error = exc
            continue
        return PersonaSummary.from_text(profile.persona_id, text)
    assert last_error is not None
    raise last_error


def pairwise_dedup_violations(
    personas: Iterable[PersonaProfile], embedder, threshold: float = 0.80
) -> list[tuple[str, str, float]]:
    """Brute-force post-hoc check: all accepted pairs must sit at or below threshold."""
    personas = list(personas)
    vectors = [embedder.embed(render_profile(p)) for p in personas]
    violations = []
    for i in range(len(personas)):
        for j in range(i + 1, len(personas)):
            sim = textmetrics.cosine(vectors[i], vectors[j])
            if sim > threshold:
                violations.append((personas[i].persona_id, personas[j].persona_id, sim))
    return violations
