import itertools
import math

import numpy as np
import pytest

from medvlm.errors import ConfigError, DataError
from medvlm.metrics import (
    CompositeConfig,
    Entity,
    EntityGraph,
    TrigramHashEmbedder,
    bleu4,
    entity_match_credit,
    extract_entities,
    radcliq_composite,
    radgraph_partial_f1,
    rate_similarity_f1,
    read_entity_records,
    reciprocal_mean,
    write_entity_records,
)
from medvlm.metrics.corpus import read_report_records, score_report_corpus
from medvlm.metrics.radgraph import _assign_exact, _assign_greedy, _credit_matrix
from medvlm.rng import KeyedRng


def brute_force_assignment(credit: np.ndarray) -> float:
    m, n = credit.shape
    if m == 0 or n == 0:
        return 0.0
    if m > n:
        credit = credit.T
        m, n = n, m
    best = 0.0
    for perm in itertools.permutations(range(n), m):
        best = max(best, sum(credit[i, perm[i]] for i in range(m)))
    return best


def random_graph(rng: KeyedRng, max_len: int = 6) -> EntityGraph:
    texts = ["effusion", "edema", "heart", "lung"]
    labels = ["observation", "anatomy"]
    pols = ["positive", "negative"]
    n = rng.randbelow(max_len + 1)
    ents = tuple(
        Entity(rng.choice(texts), rng.choice(labels), rng.choice(pols))
        for _ in range(n)
    )
    return EntityGraph(entities=ents)


class TestEntity:
    def test_normalizes_text(self):
        e = Entity("  Pleural   EFFUSION ", "observation")
        assert e.text == "pleural effusion"

    def test_empty_text_rejected(self):
        with pytest.raises(DataError):
            Entity("   ", "observation")

    def test_bad_polarity_rejected(self):
        with pytest.raises(DataError):
            Entity("edema", "observation", "maybe")

    def test_dict_round_trip(self):
        e = Entity("edema", "observation", "negative")
        assert Entity.from_dict(e.to_dict()) == e

    def test_from_dict_missing_field(self):
        with pytest.raises(DataError):
            Entity.from_dict({"text": "edema"})

    def test_relation_out_of_range(self):
        ents = (Entity("heart", "anatomy"),)
        with pytest.raises(DataError):
            EntityGraph(entities=ents, relations=((0, 1, "located_at"),))


class TestExtractor:
    def test_finds_lexicon_terms_in_order(self):
        g = extract_entities("findings: heart enlarged. impression: normal study.")
        assert [e.text for e in g.entities] == ["heart", "enlarged", "normal"]
        assert [e.label for e in g.entities] == ["anatomy", "observation", "observation"]

    def test_no_negates_within_window(self):
        g = extract_entities("there is no pleural effusion")
        (e,) = [e for e in g.entities if e.text == "effusion"]
        assert e.polarity == "negative"

    def test_without_negates(self):
        g = extract_entities("lungs without consolidation")
        (e,) = [e for e in g.entities if e.text == "consolidation"]
        assert e.polarity == "negative"

    def test_negative_for_negates(self):
        g = extract_entities("exam negative for pneumonia")
        (e,) = [e for e in g.entities if e.text == "pneumonia"]
        assert e.polarity == "negative"

    def test_cue_outside_window_does_not_negate(self):
        # "no" sits 4 tokens before "edema", one past the 3-token window
        g = extract_entities("no acute process is present edema")
        (e,) = [e for e in g.entities if e.text == "edema"]
        assert e.polarity == "positive"

    def test_unknown_words_ignored(self):
        assert extract_entities("the quick brown fox").entities == ()


class TestCredit:
    def test_identical(self):
        e = Entity("edema", "observation")
        assert entity_match_credit(e, e) == 1.0

    def test_polarity_flip_half(self):
        a = Entity("edema", "observation", "positive")
        b = Entity("edema", "observation", "negative")
        assert entity_match_credit(a, b) == 0.5

    def test_label_mismatch_half(self):
        a = Entity("edema", "observation")
        b = Entity("edema", "anatomy")
        assert entity_match_credit(a, b) == 0.5

    def test_different_text_zero(self):
        assert entity_match_credit(Entity("edema", "observation"),
                                   Entity("effusion", "observation")) == 0.0


class TestRadgraphF1:
    def test_identical_graphs(self):
        g = EntityGraph(entities=(
            Entity("heart", "anatomy"),
            Entity("edema", "observation"),
            Entity("effusion", "observation", "negative"),
        ))
        assert radgraph_partial_f1(g, g) == 1.0

    def test_disjoint_texts(self):
        a = EntityGraph(entities=(Entity("heart", "anatomy"),))
        b = EntityGraph(entities=(Entity("lung", "anatomy"),))
        assert radgraph_partial_f1(a, b) == 0.0

    def test_polarity_flip_worked_example(self):
        ref = EntityGraph(entities=(
            Entity("heart", "anatomy", "positive"),
            Entity("edema", "observation", "positive"),
        ))
        pred = EntityGraph(entities=(
            Entity("heart", "anatomy", "positive"),
            Entity("edema", "observation", "negative"),
        ))
        assert radgraph_partial_f1(pred, ref) == pytest.approx(0.75, abs=1e-6)

    def test_empty_conventions(self):
        empty = EntityGraph()
        nonempty = EntityGraph(entities=(Entity("heart", "anatomy"),))
        assert radgraph_partial_f1(empty, empty) == 1.0
        assert radgraph_partial_f1(empty, nonempty) == 0.0
        assert radgraph_partial_f1(nonempty, empty) == 0.0

    def test_symmetric(self):
        rng = KeyedRng(3, "sym")
        for t in range(50):
            a = random_graph(rng.child(str(t), "a"))
            b = random_graph(rng.child(str(t), "b"))
            assert radgraph_partial_f1(a, b) == pytest.approx(
                radgraph_partial_f1(b, a), abs=1e-12)

    def test_exact_and_greedy_match_brute_force(self):
        rng = KeyedRng(7, "assign")
        for t in range(400):
            a = random_graph(rng.child(str(t), "a"))
            b = random_graph(rng.child(str(t), "b"))
            credit = _credit_matrix(a, b)
            if credit.size == 0:
                continue
            oracle = brute_force_assignment(credit)
            assert _assign_exact(credit) == pytest.approx(oracle, abs=1e-9)
            assert _assign_greedy(credit) == pytest.approx(oracle, abs=1e-9)

    def test_range(self):
        rng = KeyedRng(11, "range")
        for t in range(100):
            a = random_graph(rng.child(str(t), "a"))
            b = random_graph(rng.child(str(t), "b"))
            f1 = radgraph_partial_f1(a, b)
            assert 0.0 <= f1 <= 1.0


class TestEmbedder:
    def test_unit_norm(self):
        v = TrigramHashEmbedder().embed("pleural effusion")
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        a = TrigramHashEmbedder().embed("cardiomegaly")
        b = TrigramHashEmbedder().embed("cardiomegaly")
        assert np.array_equal(a, b)

    def test_empty_text_zero_vector(self):
        assert np.all(TrigramHashEmbedder().embed("") == 0.0)

    def test_short_text_embeds(self):
        assert np.linalg.norm(TrigramHashEmbedder().embed("ab")) == pytest.approx(1.0)


class _ConstantEmbedder:
    def embed(self, text: str) -> np.ndarray:
        return np.array([1.0, 0.0])


class TestRateF1:
    def test_identical_sets(self):
        ents = [Entity("edema", "observation"), Entity("heart", "anatomy")]
        assert rate_similarity_f1(ents, ents) == pytest.approx(1.0, abs=1e-12)

    def test_opposite_polarity_scores_zero(self):
        a = [Entity("edema", "observation", "positive")]
        b = [Entity("edema", "observation", "negative")]
        assert rate_similarity_f1(a, b) == 0.0

    def test_empty_conventions(self):
        ents = [Entity("edema", "observation")]
        assert rate_similarity_f1([], []) == 1.0
        assert rate_similarity_f1([], ents) == 0.0
        assert rate_similarity_f1(ents, []) == 0.0

    def test_constant_embedder_saturates(self):
        a = [Entity("edema", "observation"), Entity("heart", "anatomy")]
        b = [Entity("lung", "anatomy")]
        assert rate_similarity_f1(a, b, embedder=_ConstantEmbedder(), tau=0.0) == \
            pytest.approx(1.0)

    def test_soft_score_equals_cosine_when_above_gate(self):
        emb = TrigramHashEmbedder()
        va, vb = emb.embed("effusion"), emb.embed("effusions")
        sim = float(np.dot(va, vb))
        assert 0.0 < sim < 1.0
        a = [Entity("effusion", "observation")]
        b = [Entity("effusions", "observation")]
        assert rate_similarity_f1(a, b, tau=0.0) == pytest.approx(sim, abs=1e-9)

    def test_gate_zeroes_below_tau(self):
        emb = TrigramHashEmbedder()
        sim = float(np.dot(emb.embed("effusion"), emb.embed("effusions")))
        a = [Entity("effusion", "observation")]
        b = [Entity("effusions", "observation")]
        assert rate_similarity_f1(a, b, tau=min(0.999, sim + 1e-6)) == 0.0

    def test_bad_tau_rejected(self):
        with pytest.raises(ValueError):
            rate_similarity_f1([], [], tau=1.5)


class TestBleu:
    def test_identical(self):
        assert bleu4("The heart is enlarged.", "the heart is enlarged") == \
            pytest.approx(1.0, abs=1e-12)

    def test_zero_overlap(self):
        assert bleu4("alpha beta gamma delta", "one two three four") == 0.0

    def test_brevity_worked_example(self):
        got = bleu4("a b c d", "a b c d e")
        assert got == pytest.approx(math.exp(1.0 - 5.0 / 4.0), abs=1e-6)
        assert got == pytest.approx(0.7788007830714049, abs=1e-9)

    def test_empty_pred(self):
        assert bleu4("", "the heart") == 0.0

    def test_short_pred_skips_missing_orders(self):
        # 2 tokens: only 1- and 2-gram precisions exist, both perfect
        assert bleu4("a b", "a b") == pytest.approx(1.0, abs=1e-12)

    def test_range(self):
        rng = KeyedRng(5, "bleu")
        words = ["heart", "lung", "clear", "dense", "normal"]
        for t in range(100):
            r = rng.child(str(t))
            pred = " ".join(r.choice(words) for _ in range(r.randbelow(8)))
            ref = " ".join(r.choice(words) for _ in range(r.randbelow(8) + 1))
            assert 0.0 <= bleu4(pred, ref) <= 1.0


class TestComposite:
    def test_perfect_report(self):
        assert radcliq_composite(1.0, 1.0) == 0.0

    def test_worst_report(self):
        assert radcliq_composite(0.0, 0.0) == 2.0

    def test_worked_example(self):
        assert radcliq_composite(0.75, 0.5) == pytest.approx(0.75, abs=1e-12)

    def test_monotone_decreasing(self):
        base = radcliq_composite(0.5, 0.5)
        assert radcliq_composite(0.6, 0.5) < base
        assert radcliq_composite(0.5, 0.6) < base

    def test_custom_weights(self):
        cfg = CompositeConfig(w0=1.0, w1=2.0, w2=0.5)
        assert radcliq_composite(0.5, 0.0, cfg) == pytest.approx(1.0 + 1.0 + 0.5)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            radcliq_composite(1.5, 0.0)
        with pytest.raises(ValueError):
            radcliq_composite(0.0, -0.1)


class TestReciprocalMean:
    def test_pair(self):
        assert reciprocal_mean([2.0, 2.0]) == pytest.approx(0.5)

    def test_singleton(self):
        assert reciprocal_mean([1.0]) == pytest.approx(1.0)

    def test_not_mean_of_reciprocals(self):
        got = reciprocal_mean([1.0, 3.0])
        assert got == pytest.approx(0.5, abs=1e-12)
        mean_of_recips = (1.0 / 1.0 + 1.0 / 3.0) / 2.0
        assert abs(got - mean_of_recips) > 0.1

    def test_singleton_inverse_property(self):
        rng = KeyedRng(9, "recip")
        for _ in range(50):
            x = float(rng.uniform(0.01, 10.0))
            assert reciprocal_mean([x]) == pytest.approx(1.0 / x, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            reciprocal_mean([])

    def test_nonpositive_mean_rejected(self):
        with pytest.raises(ValueError):
            reciprocal_mean([1.0, -1.0])


class TestCorpus:
    def _write(self, path, rows):
        from medvlm.util import write_jsonl
        write_jsonl(path, rows)

    def test_entity_record_round_trip(self, tmp_path):
        g = EntityGraph(entities=(Entity("edema", "observation", "negative"),))
        p = tmp_path / "ents.jsonl"
        write_entity_records(p, [("r1", g)])
        back = read_entity_records(p)
        assert back["r1"] == g

    def test_duplicate_report_id_rejected(self, tmp_path):
        p = tmp_path / "ents.jsonl"
        self._write(p, [{"report_id": "r1", "entities": []},
                        {"report_id": "r1", "entities": []}])
        with pytest.raises(DataError):
            read_entity_records(p)

    def test_bleu_corpus(self, tmp_path):
        pred = tmp_path / "pred.jsonl"
        ref = tmp_path / "ref.jsonl"
        self._write(pred, [{"report_id": "r1", "text": "a b c d"},
                           {"report_id": "r2", "text": "x y"}])
        self._write(ref, [{"report_id": "r1", "text": "a b c d e"},
                          {"report_id": "r2", "text": "x y"}])
        res = score_report_corpus(read_report_records(pred), read_report_records(ref), "bleu")
        assert res["n"] == 2
        by_id = {r["report_id"]: r["score"] for r in res["per_report"]}
        assert by_id["r1"] == pytest.approx(math.exp(-0.25), abs=1e-9)
        assert by_id["r2"] == pytest.approx(1.0)
        assert res["mean"] == pytest.approx((by_id["r1"] + by_id["r2"]) / 2)

    def test_graph_metric_extracts_from_text(self, tmp_path):
        pred = tmp_path / "pred.jsonl"
        ref = tmp_path / "ref.jsonl"
        self._write(pred, [{"report_id": "r1", "text": "heart enlarged"}])
        self._write(ref, [{"report_id": "r1", "text": "heart enlarged"}])
        res = score_report_corpus(read_report_records(pred), read_report_records(ref), "radgraph")
        assert res["per_report"][0]["score"] == pytest.approx(1.0)

    def test_radcliq_reports_reciprocal_mean(self, tmp_path):
        pred = tmp_path / "pred.jsonl"
        ref = tmp_path / "ref.jsonl"
        self._write(pred, [{"report_id": "r1", "text": "no edema"},
                           {"report_id": "r2", "text": "heart enlarged"}])
        self._write(ref, [{"report_id": "r1", "text": "severe edema"},
                          {"report_id": "r2", "text": "heart enlarged"}])
        res = score_report_corpus(read_report_records(pred), read_report_records(ref), "radcliq")
        assert res["reciprocal_mean"] == pytest.approx(1.0 / res["mean"])
        assert res["composite_weights"] == {"w0": 0.0, "w1": 1.0, "w2": 1.0}

    def test_id_mismatch_rejected(self, tmp_path):
        pred = tmp_path / "pred.jsonl"
        ref = tmp_path / "ref.jsonl"
        self._write(pred, [{"report_id": "r1", "text": "a"}])
        self._write(ref, [{"report_id": "r2", "text": "a"}])
        with pytest.raises(DataError):
            score_report_corpus(read_report_records(pred), read_report_records(ref), "bleu")

    def test_unknown_metric_rejected(self):
        with pytest.raises(ConfigError):
            score_report_corpus({}, {}, "rouge")
