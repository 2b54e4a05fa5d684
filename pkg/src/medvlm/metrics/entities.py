"""Clinical entity records and a small deterministic extractor for demos.

The metrics in this package consume pre-extracted entity graphs; real
extractors are learned models and live outside this codebase.  The
lexicon extractor here exists so end-to-end demos can turn generated
report text into something scoreable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from medvlm.errors import DataError
from medvlm.util import read_jsonl, write_jsonl

POSITIVE = "positive"
NEGATIVE = "negative"
POLARITIES = (POSITIVE, NEGATIVE)

# Negation cues scanned over the 3 tokens preceding a lexicon hit.
NEGATION_WINDOW = 3
_NEGATION_SINGLE = frozenset({"no", "without"})

_WS = re.compile(r"\s+")
_TOKEN = re.compile(r"[a-z0-9]+")


def normalize_entity_text(text: str) -> str:
    return _WS.sub(" ", text.strip().lower())


@dataclass(frozen=True)
class Entity:
    """One clinical mention: normalized text span, category label, polarity."""

    text: str
    label: str
    polarity: str = POSITIVE

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", normalize_entity_text(self.text))
        if not self.text:
            raise DataError("entity text must be non-empty")
        if self.polarity not in POLARITIES:
            raise DataError(f"entity polarity must be one of {POLARITIES}, got {self.polarity!r}")

    def to_dict(self) -> dict:
        return {"text": self.text, "label": self.label, "polarity": self.polarity}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Entity":
        try:
            return cls(text=d["text"], label=d["label"], polarity=d.get("polarity", POSITIVE))
        except KeyError as e:
            raise DataError(f"entity record missing field {e.args[0]!r}") from e


@dataclass
class EntityGraph:
    """Multiset of entities plus optional (src, dst, label) relations."""

    entities: tuple[Entity, ...] = ()
    relations: tuple[tuple[int, int, str], ...] = ()

    def __post_init__(self) -> None:
        self.entities = tuple(self.entities)
        self.relations = tuple(self.relations)
        n = len(self.entities)
        for src, dst, _label in self.relations:
            if not (0 <= src < n and 0 <= dst < n):
                raise DataError(f"relation ({src}, {dst}) out of range for {n} entities")

    def to_dict(self) -> dict:
        d: dict = {"entities": [e.to_dict() for e in self.entities]}
        if self.relations:
            d["relations"] = [list(r) for r in self.relations]
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "EntityGraph":
        entities = tuple(Entity.from_dict(e) for e in d.get("entities", ()))
        relations = tuple((int(s), int(t), str(label)) for s, t, label in d.get("relations", ()))
        return cls(entities=entities, relations=relations)


# Single-token demo lexicon: term -> category label.
DEFAULT_LEXICON: dict[str, str] = {
    "heart": "anatomy",
    "lung": "anatomy",
    "lungs": "anatomy",
    "bone": "anatomy",
    "liver": "anatomy",
    "kidney": "anatomy",
    "chest": "anatomy",
    "spine": "anatomy",
    "pleura": "anatomy",
    "normal": "observation",
    "clear": "observation",
    "dense": "observation",
    "enlarged": "observation",
    "effusion": "observation",
    "pneumonia": "observation",
    "edema": "observation",
    "consolidation": "observation",
    "opacity": "observation",
    "fracture": "observation",
    "cardiomegaly": "observation",
    "pneumothorax": "observation",
    "atelectasis": "observation",
    "nodule": "observation",
}


def _window_negated(tokens: list[str], i: int) -> bool:
    window = tokens[max(0, i - NEGATION_WINDOW):i]
    for j, tok in enumerate(window):
        if tok in _NEGATION_SINGLE:
            return True
        # "negative for" counts only when both words sit inside the window
        if tok == "negative" and j + 1 < len(window) and window[j + 1] == "for":
            return True
    return False


def extract_entities(text: str, lexicon: Mapping[str, str] | None = None) -> EntityGraph:
    """Lexicon lookup with a 3-token negation window; demo quality only."""
    lex = DEFAULT_LEXICON if lexicon is None else lexicon
    tokens = _TOKEN.findall(text.lower())
    found: list[Entity] = []
    for i, tok in enumerate(tokens):
        label = lex.get(tok)
        if label is None:
            continue
        polarity = NEGATIVE if _window_negated(tokens, i) else POSITIVE
        found.append(Entity(text=tok, label=label, polarity=polarity))
    return EntityGraph(entities=tuple(found))


def read_entity_records(path: str | Path) -> dict[str, EntityGraph]:
    """Line-delimited {report_id, entities: [...]} records, insertion-ordered."""
    out: dict[str, EntityGraph] = {}
    for i, rec in enumerate(read_jsonl(path), start=1):
        rid = rec.get("report_id")
        if not isinstance(rid, str) or not rid:
            raise DataError(f"{path}:{i}: missing or empty report_id")
        if rid in out:
            raise DataError(f"{path}:{i}: duplicate report_id {rid!r}")
        out[rid] = EntityGraph.from_dict(rec)
    return out


def write_entity_records(path: str | Path, graphs: Iterable[tuple[str, EntityGraph]]) -> None:
    write_jsonl(path, ({"report_id": rid, **g.to_dict()} for rid, g in graphs))
