"""Report-generation metrics: entity graphs, partial-credit F1, similarity F1, BLEU, composite."""

from medvlm.metrics.bleu import bleu4, tokenize_for_bleu
from medvlm.metrics.composite import CompositeConfig, radcliq_composite, reciprocal_mean
from medvlm.metrics.entities import (
    Entity,
    EntityGraph,
    extract_entities,
    read_entity_records,
    write_entity_records,
)
from medvlm.metrics.radgraph import entity_match_credit, radgraph_partial_f1
from medvlm.metrics.rate import TrigramHashEmbedder, rate_similarity_f1

__all__ = [
    "CompositeConfig",
    "Entity",
    "EntityGraph",
    "TrigramHashEmbedder",
    "bleu4",
    "entity_match_credit",
    "extract_entities",
    "radcliq_composite",
    "radgraph_partial_f1",
    "rate_similarity_f1",
    "read_entity_records",
    "reciprocal_mean",
    "tokenize_for_bleu",
    "write_entity_records",
]
