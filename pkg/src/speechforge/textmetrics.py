"""Deterministic text math shared by all pipeline stages.

Tokenization, word counts, edit-distance WER, token-set Jaccard overlap,
and embedding cosine similarity. Everything here is a pure function.
"""

from __future__ import annotations

import re
from typing import Sequence

import numpy as np

TokenSeq = list[str]

# \w alone drops combining marks, which would shred diacritized Arabic into
# single letters; extend the word-character class with the Arabic mark ranges.
_ARABIC_MARKS = "ؐ-ًؚ-ٰٟۖ-ۜ۟-۪ۨ-ۭ"
_WORD_RE = re.compile(rf"[\w{_ARABIC_MARKS}]+")

_DIACRITICS_RE = re.compile(rf"[{_ARABIC_MARKS}ـ]")  # marks + tatweel
_ALEF_VARIANTS = str.maketrans({"أ": "ا", "إ": "ا", "آ": "ا", "ٱ": "ا", "ة": "ه", "ى": "ي"})


def normalize_arabic(text: str) -> str:
    """Strip Arabic diacritics/tatweel and unify alef, teh-marbuta, and alef-maqsura."""
    return _DIACRITICS_RE.sub("", text).translate(_ALEF_VARIANTS)


def tokenize(text: str, mode: str = "word") -> TokenSeq:
    """Split text into normalized tokens.

    mode "word": casefold, split on whitespace/punctuation, punctuation dropped.
    mode "wer": word splitting plus Arabic orthography normalization, for
    scoring ASR hypotheses whose spelling conventions differ from references.
    """
    if mode not in ("word", "wer"):
        raise ValueError(f"unknown tokenize mode: {mode!r}")
    if mode == "wer":
        text = normalize_arabic(text)
    tokens = []
    for raw in _WORD_RE.findall(text.casefold()):
        tokens.extend(part for part in raw.split("_") if part)
    return tokens


def count_words(text: str) -> int:
    """Number of word-split tokens in text."""
    return len(tokenize(text))


def wer(reference: Sequence[str], hypothesis: Sequence[str]) -> float:
    """Word error rate: (substitutions + insertions + deletions) / |reference|.

    Computed over token sequences via minimal edit distance; may exceed 1.
    Raises ValueError on an empty reference.
    """
    if not reference:
        raise ValueError("WER undefined for an empty reference")
    prev = list(range(len(hypothesis) + 1))
    for i, ref_tok in enumerate(reference, start=1):
        cur = [i] + [0] * len(hypothesis)
        for j, hyp_tok in enumerate(hypothesis, start=1):
            cost = 0 if ref_tok == hyp_tok else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[-1] / len(reference)


def jaccard(a: Sequence[str], b: Sequence[str]) -> float:
    """Token-set Jaccard overlap |A∩B| / |A∪B|; duplicates collapse.

    Both-empty is defined as 0.0 (conservative for matching).
    """
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def cosine(a, b) -> float:
    """Cosine similarity: dot product over the product of Euclidean norms."""
    va = np.asarray(a, dtype=float)
    vb = np.asarray(b, dtype=float)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for a zero vector")
    return float(np.dot(va, vb) / (na * nb))
