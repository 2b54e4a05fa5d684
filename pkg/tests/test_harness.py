import base64
import json

import httpx
import pytest

from medvlm.bench.schema import BenchmarkInstance
from medvlm.errors import ConfigError, DataError, EndpointError
from medvlm.harness import (
    CompletionResult,
    EndpointConfig,
    EvalRecord,
    HttpChatClient,
    extract_option,
    format_prompt,
    format_summary_table,
    score_records,
)
from medvlm.harness.client import API_KEY_ENV, wire_messages
from medvlm.harness.templates import ANSWER_INSTRUCTION, SYSTEM_PROMPT


def mc_instance(**kw) -> BenchmarkInstance:
    base = dict(
        id="t1",
        dataset="toy-mc",
        question="What shape is shown?",
        options=[("A", "circle"), ("B", "square")],
        answer_key="B",
    )
    base.update(kw)
    return BenchmarkInstance(**base).validate()


class TestTemplates:
    def test_zero_shot_golden(self):
        inst = mc_instance(question="<image>\nWhat shape is shown?", images=["x.ppm"])
        assert format_prompt(inst, "medvlm-chat@1") == [
            {"role": "system",
             "content": [{"type": "text", "text": SYSTEM_PROMPT}]},
            {"role": "user",
             "content": [
                 {"type": "image", "path": "x.ppm"},
                 {"type": "text",
                  "text": "What shape is shown?\nA. circle\nB. square\n"
                          + ANSWER_INSTRUCTION},
             ]},
        ]

    def test_one_shot_exemplar_precedes_query(self):
        shot = mc_instance(id="s1", question="Warmup?", answer_key="A")
        inst = mc_instance(shots=[shot])
        msgs = format_prompt(inst)
        assert [m["role"] for m in msgs] == ["system", "user", "assistant", "user"]
        assert msgs[1]["content"][-1]["text"].startswith("Warmup?")
        assert msgs[2]["content"] == [{"type": "text", "text": "A"}]
        assert msgs[3]["content"][-1]["text"].startswith("What shape is shown?")

    def test_generation_instance_has_no_options_or_instruction(self):
        inst = BenchmarkInstance(
            id="g1", dataset="imp", question="<image>\nWrite the impression.",
            options=[], answer_key="", images=["a.ppm"],
            meta={"reference": "normal study"}).validate()
        msgs = format_prompt(inst)
        text = msgs[-1]["content"][-1]["text"]
        assert text == "Write the impression."
        assert ANSWER_INSTRUCTION not in text

    def test_generation_shot_reply_is_reference(self):
        shot = BenchmarkInstance(
            id="g0", dataset="imp", question="Write one.", options=[],
            answer_key="", meta={"reference": "clear lungs"}).validate()
        inst = BenchmarkInstance(
            id="g1", dataset="imp", question="Write one.", options=[],
            answer_key="", shots=[shot]).validate()
        msgs = format_prompt(inst)
        assert msgs[2]["content"] == [{"type": "text", "text": "clear lungs"}]

    def test_marker_count_mismatch_rejected(self):
        inst = mc_instance(question="<image>\nWhat?", images=[])
        with pytest.raises(DataError):
            format_prompt(inst)

    def test_unknown_template_rejected(self):
        with pytest.raises(ConfigError):
            format_prompt(mc_instance(), "other-chat@9")


class TestExtract:
    OPTS = [("A", "circle"), ("B", "square"), ("C", "cross"), ("D", "star")]

    def test_marker_parenthesized(self):
        assert extract_option("The answer is (B).", self.OPTS) == "B"

    def test_marker_plain(self):
        assert extract_option("the answer is c", self.OPTS) == "C"

    def test_marker_colon_no_is(self):
        assert extract_option("Answer: d", self.OPTS) == "D"

    def test_last_marker_wins(self):
        out = "The answer is A. On reflection, the answer is C."
        assert extract_option(out, self.OPTS) == "C"

    def test_marker_requires_letter_boundary(self):
        assert extract_option("The answer is Borderline.", self.OPTS) is None

    def test_bare_letter(self):
        assert extract_option("C", self.OPTS) == "C"

    def test_bare_letter_with_punctuation(self):
        assert extract_option(" (b). ", self.OPTS) == "B"

    def test_multiple_bare_letters_null(self):
        assert extract_option("A or B", self.OPTS) is None

    def test_full_text_match(self):
        assert extract_option("  Square ", self.OPTS) == "B"

    def test_full_text_requires_unique(self):
        opts = [("A", "same"), ("B", "same")]
        assert extract_option("same", opts) is None

    def test_refusal_is_null(self):
        assert extract_option("I cannot determine this.", self.OPTS) is None

    def test_letter_outside_valid_keys_null(self):
        assert extract_option("The answer is (F).", self.OPTS) is None

    def test_empty_output(self):
        assert extract_option("", self.OPTS) is None

    def test_marker_beats_full_text(self):
        assert extract_option("circle. the answer is B", self.OPTS) == "B"

    def test_total_on_arbitrary_strings(self):
        valid = {k for k, _ in self.OPTS}
        for s in ["", " ", "\n", "??", "answer", "answer is", "(", "日本語",
                  "a" * 500, "answer is answer", "answer is (a) or (b)"]:
            got = extract_option(s, self.OPTS)
            assert got is None or got in valid


def record(i, extracted, gold="A", failed=False):
    return EvalRecord(
        instance_id=f"q{i}", raw_output=str(extracted), extracted=extracted,
        gold=gold, correct=extracted is not None and extracted == gold,
        latency_ms=1.0, failed=failed)


class TestScoring:
    def test_three_of_four(self):
        recs = [record(0, "A"), record(1, "A"), record(2, "A"), record(3, "B")]
        assert score_records(recs)["accuracy"] == 75.00

    def test_all_null_extracted(self):
        recs = [record(0, None), record(1, None)]
        s = score_records(recs)
        assert s["accuracy"] == 0.0
        assert s["n_null_extracted"] == 2

    def test_duplicate_id_rejected(self):
        with pytest.raises(DataError):
            score_records([record(0, "A"), record(0, "A")])

    def test_bijection_with_instances_enforced(self):
        recs = [record(0, "A")]
        other = [mc_instance(id="zzz")]
        with pytest.raises(DataError):
            score_records(recs, other)

    def test_subject_breakdown(self):
        insts = [mc_instance(id="q0", subject="anatomy", answer_key="A"),
                 mc_instance(id="q1", subject="anatomy", answer_key="A"),
                 mc_instance(id="q2", subject="nutrition", answer_key="A")]
        recs = [record(0, "A"), record(1, "B"), record(2, "A")]
        s = score_records(recs, insts)
        assert s["by_subject"]["anatomy"] == {"n": 2, "n_correct": 1, "accuracy": 50.0}
        assert s["by_subject"]["nutrition"]["accuracy"] == 100.0

    def test_failed_counted(self):
        recs = [record(0, None, failed=True), record(1, "A")]
        assert score_records(recs)["n_transport_failed"] == 1

    def test_inconsistent_correct_flag_rejected(self):
        r = record(0, "A")
        r.correct = False
        with pytest.raises(DataError):
            r.validate()

    def test_negative_latency_rejected(self):
        r = record(0, "A")
        r.latency_ms = -1.0
        with pytest.raises(DataError):
            r.validate()

    def test_record_dict_round_trip(self):
        r = record(0, None, gold="C")
        assert EvalRecord.from_dict(r.to_dict()) == r

    def test_table_mentions_accuracy(self):
        recs = [record(0, "A")]
        table = format_summary_table(score_records(recs))
        assert "100.00%" in table


def fixed_response(content="hello"):
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def make_client(handler, **cfg_kw):
    cfg = EndpointConfig(base_url="http://mock", **cfg_kw)
    return HttpChatClient(cfg, transport=httpx.MockTransport(handler))


MESSAGES = [{"role": "user", "content": [{"type": "text", "text": "hi"}]}]


class TestHttpClient:
    def test_fixed_body_recorded(self):
        client = make_client(lambda req: fixed_response("The answer is (A)."))
        got = client.complete(MESSAGES)
        assert got == CompletionResult(text="The answer is (A).", attempts=1)

    def test_payload_shape(self):
        seen = {}

        def handler(req):
            seen.update(json.loads(req.content))
            return fixed_response()

        client = make_client(handler, model="m-x", max_new_tokens=7, stop=("##",))
        client.complete(MESSAGES)
        assert seen["model"] == "m-x"
        assert seen["temperature"] == 0.0
        assert seen["max_tokens"] == 7
        assert seen["stop"] == ["##"]
        assert seen["messages"][0]["content"] == [{"type": "text", "text": "hi"}]

    def test_fail_twice_then_succeed(self):
        calls = {"n": 0}

        def handler(req):
            calls["n"] += 1
            if calls["n"] <= 2:
                raise httpx.ConnectError("down")
            return fixed_response("ok")

        client = make_client(handler, max_retries=3)
        got = client.complete(MESSAGES)
        assert got.text == "ok"
        assert got.attempts == 3

    def test_retries_exhausted(self):
        def handler(req):
            raise httpx.ConnectError("down")

        client = make_client(handler, max_retries=1)
        with pytest.raises(EndpointError, match="after 2 attempts"):
            client.complete(MESSAGES)

    def test_5xx_retried(self):
        calls = {"n": 0}

        def handler(req):
            calls["n"] += 1
            if calls["n"] == 1:
                return httpx.Response(503, text="busy")
            return fixed_response("ok")

        assert make_client(handler).complete(MESSAGES).attempts == 2

    def test_4xx_not_retried(self):
        calls = {"n": 0}

        def handler(req):
            calls["n"] += 1
            return httpx.Response(400, text="bad request")

        client = make_client(handler, max_retries=5)
        with pytest.raises(EndpointError, match="400"):
            client.complete(MESSAGES)
        assert calls["n"] == 1

    def test_malformed_body_not_retried(self):
        calls = {"n": 0}

        def handler(req):
            calls["n"] += 1
            return httpx.Response(200, json={"nope": []})

        client = make_client(handler, max_retries=5)
        with pytest.raises(EndpointError, match="malformed"):
            client.complete(MESSAGES)
        assert calls["n"] == 1

    def test_non_string_content_rejected(self):
        client = make_client(
            lambda req: httpx.Response(200, json={"choices": [{"message": {"content": 7}}]}))
        with pytest.raises(EndpointError, match="not str"):
            client.complete(MESSAGES)

    def test_stop_sequence_truncates(self):
        client = make_client(lambda req: fixed_response("yes\nuser: more"),
                             stop=("\nuser:",))
        assert client.complete(MESSAGES).text == "yes"

    def test_api_key_header(self, monkeypatch):
        monkeypatch.setenv(API_KEY_ENV, "sk-test")
        seen = {}

        def handler(req):
            seen["auth"] = req.headers.get("Authorization")
            return fixed_response()

        make_client(handler).complete(MESSAGES)
        assert seen["auth"] == "Bearer sk-test"

    def test_nonzero_temperature_rejected(self):
        with pytest.raises(ConfigError):
            EndpointConfig(base_url="http://x", temperature=0.7).validate()

    def test_negative_retries_rejected(self):
        with pytest.raises(ConfigError):
            EndpointConfig(base_url="http://x", max_retries=-1).validate()

    def test_missing_base_url_rejected(self):
        with pytest.raises(ConfigError):
            HttpChatClient(EndpointConfig())


class TestWireMessages:
    def test_image_part_base64_inlined(self, tmp_path):
        img = tmp_path / "i.bin"
        img.write_bytes(b"\x00\x01\x02")
        msgs = [{"role": "user", "content": [{"type": "image", "path": str(img)},
                                             {"type": "text", "text": "q"}]}]
        wired = wire_messages(msgs)
        part = wired[0]["content"][0]
        assert part["type"] == "image"
        assert base64.b64decode(part["data"]) == b"\x00\x01\x02"
