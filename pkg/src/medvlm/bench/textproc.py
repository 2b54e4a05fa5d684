"""Clinical text preprocessing: sentence segmentation and criteria cleanup."""

from __future__ import annotations

import re

# words that end with a period without ending a sentence; compared lowercase
ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr",
    "pt", "pts", "hx", "dx", "tx", "rx", "fx", "sx",
    "vs", "etc", "approx", "e.g", "i.e", "resp", "dept",
    "mg", "ml", "kg", "cm", "mm", "no", "vol",
})

_BOUNDARY = re.compile(r"([.!?]+)(\s+)")
_WORD_BEFORE = re.compile(r"(\S+)$")


def normalize_whitespace(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def segment_sentences(note: str) -> list[tuple[str, str]]:
    """Split a note into (id, sentence) pairs with ids S1..Sn.

    Boundaries are sentence-ending punctuation followed by whitespace,
    except when the word before the punctuation is a known abbreviation.
    Joining the sentences with single spaces reproduces the
    whitespace-normalized note.
    """
    text = normalize_whitespace(note)
    if not text:
        return []
    cuts: list[int] = []
    for m in _BOUNDARY.finditer(text):
        before = _WORD_BEFORE.search(text[:m.end(1)])
        word = before.group(1) if before else ""
        stripped = word.rstrip(".!?").lstrip("(\"'").lower()
        if stripped in ABBREVIATIONS:
            continue
        cuts.append(m.end(1))
    sentences: list[str] = []
    start = 0
    for cut in cuts:
        seg = text[start:cut].strip()
        if seg:
            sentences.append(seg)
        start = cut
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return [(f"S{i + 1}", s) for i, s in enumerate(sentences)]


_HEADER_PHRASES = frozenset({
    "inclusion criteria", "exclusion criteria", "key inclusion criteria",
    "key exclusion criteria", "inclusion", "exclusion", "criteria",
    "eligibility", "eligibility criteria",
})
_BULLET = re.compile(r"^[-*•·>]+\s*")
_NUMBERING = re.compile(r"^\(?(?:\d{1,3}|[ivxlcdm]{1,6}|[IVXLCDM]{1,6})[.)]\s+")
_NUMBER_PAREN = re.compile(r"^\(\s*(?:\d{1,3}|[ivxlcdm]{1,6})\s*\)\s*")

MIN_CRITERION_WORDS = 3


def clean_criteria(raw: str) -> list[str]:
    """Extract criterion lines from raw inclusion/exclusion text.

    Drops header lines, strips bullet and numbering prefixes, and removes
    fragments shorter than MIN_CRITERION_WORDS words.
    """
    out: list[str] = []
    for line in raw.splitlines():
        line = normalize_whitespace(line)
        if not line:
            continue
        low = line.rstrip(":").strip().lower()
        if line.endswith(":") or low in _HEADER_PHRASES:
            continue
        line = _BULLET.sub("", line)
        line = _NUMBER_PAREN.sub("", line)
        line = _NUMBERING.sub("", line)
        line = line.strip()
        if len(line.split()) < MIN_CRITERION_WORDS:
            continue
        out.append(line)
    return out
