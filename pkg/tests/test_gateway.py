import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fingract.gateway import (
    BackendUnavailable,
    DecodingParams,
    KeyMismatch,
    MockReplayBackend,
    NoStructurePresent,
    PromptTemplate,
    RateLimited,
    RemoteBackend,
    ResponseCache,
    RetryPolicy,
    UnboundPlaceholder,
    complete,
    extract_structured_list,
    render,
)


class TestRender:
    def test_direct_substitution(self):
        template = PromptTemplate("t", "Claim:\n{claim}")
        assert render(template, {"claim": "X"}) == "Claim:\nX"

    def test_missing_binding_names_the_placeholder(self):
        template = PromptTemplate("t", "Claim:\n{claim}")
        with pytest.raises(UnboundPlaceholder) as excinfo:
            render(template, {})
        assert excinfo.value.name == "claim"

    def test_single_pass_no_reexpansion(self):
        template = PromptTemplate("t", "A {x} B")
        assert render(template, {"x": "{y}"}) == "A {y} B"

    def test_json_examples_in_body_are_not_placeholders(self):
        template = PromptTemplate("t", '[{"k": "v"}] and {name}')
        assert render(template, {"name": "z"}) == '[{"k": "v"}] and z'

    def test_placeholders_listing(self):
        template = PromptTemplate("t", "{a} {b} {a} {not a placeholder}")
        assert template.placeholders() == {"a", "b"}

    @given(st.text())
    def test_binding_content_inserted_verbatim(self, payload):
        template = PromptTemplate("t", "pre {x} post")
        assert render(template, {"x": payload}) == f"pre {payload} post"


class TestDecodingParams:
    def test_defaults(self):
        params = DecodingParams()
        assert params.n_samples == 1 and params.fresh_context

    @pytest.mark.parametrize("kwargs", [dict(temperature=-1), dict(top_p=0), dict(top_p=1.5), dict(n_samples=0)])
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(ValueError):
            DecodingParams(**kwargs)


class _CountingBackend(MockReplayBackend):
    def __init__(self, script, **kwargs):
        super().__init__(script, **kwargs)
        self.calls = 0

    def complete_once(self, prompt, params):
        self.calls += 1
        return super().complete_once(prompt, params)


class TestComplete:
    def test_single_scripted_response(self):
        backend = MockReplayBackend("A")
        assert complete(backend, "anything", DecodingParams()) == ["A"]

    def test_scripted_cycle_fills_n_samples(self):
        backend = MockReplayBackend(["A", "B", "C"])
        assert complete(backend, "x", DecodingParams(n_samples=3)) == ["A", "B", "C"]
        assert complete(backend, "x", DecodingParams(n_samples=5)) == ["A", "B", "C", "A", "B"]

    def test_identical_calls_identical_output(self):
        backend = MockReplayBackend(["A", "B"])
        first = complete(backend, "x", DecodingParams())
        second = complete(backend, "x", DecodingParams())
        assert first == second == ["A"]

    def test_rule_routing_first_match_wins(self):
        backend = MockReplayBackend([("alpha", "one"), (None, "fallback")])
        assert complete(backend, "contains alpha here", DecodingParams()) == ["one"]
        assert complete(backend, "nothing matches", DecodingParams()) == ["fallback"]

    def test_no_matching_rule_is_unavailable(self):
        backend = MockReplayBackend([("alpha", "one")])
        backend.retry = RetryPolicy(attempts=2, sleep=lambda _: None)
        with pytest.raises(BackendUnavailable):
            complete(backend, "beta", DecodingParams())

    def test_cache_hit_skips_backend(self, tmp_path):
        backend = _CountingBackend("A")
        cache = ResponseCache(tmp_path / "cache")
        params = DecodingParams()
        assert complete(backend, "x", params, cache=cache) == ["A"]
        assert complete(backend, "x", params, cache=cache) == ["A"]
        assert backend.calls == 1

    def test_cache_file_holds_request_and_responses(self, tmp_path):
        backend = MockReplayBackend("A")
        cache = ResponseCache(tmp_path / "cache")
        complete(backend, "x", DecodingParams(), cache=cache)
        [path] = list((tmp_path / "cache").glob("*.json"))
        stored = json.loads(path.read_text())
        assert stored["request"]["prompt"] == "x"
        assert stored["responses"] == ["A"]

    def test_run_tag_separates_cache_entries(self, tmp_path):
        backend = _CountingBackend("A")
        cache = ResponseCache(tmp_path / "cache")
        complete(backend, "x", DecodingParams(), cache=cache, run_tag="run0")
        complete(backend, "x", DecodingParams(), cache=cache, run_tag="run1")
        assert backend.calls == 2

    def test_replay_only_without_entry_fails(self, tmp_path):
        backend = MockReplayBackend("A")
        cache = ResponseCache(tmp_path / "cache")
        with pytest.raises(BackendUnavailable):
            complete(backend, "x", DecodingParams(), cache=cache, replay_only=True)

    def test_replay_only_with_warm_cache_succeeds(self, tmp_path):
        cache = ResponseCache(tmp_path / "cache")
        complete(MockReplayBackend("A"), "x", DecodingParams(), cache=cache)
        result = complete(_CountingBackend("B"), "x", DecodingParams(), cache=cache, replay_only=True)
        assert result == ["A"]

    def test_retry_recovers_from_transient_failure(self):
        class Flaky:
            model_name = "flaky"
            retry = RetryPolicy(attempts=3, sleep=lambda _: None)

            def __init__(self):
                self.failures = 2

            def complete_once(self, prompt, params):
                if self.failures:
                    self.failures -= 1
                    raise RateLimited("slow down")
                return ["done"]

        assert complete(Flaky(), "x", DecodingParams()) == ["done"]

    def test_concurrent_identical_requests_share_the_cache_safely(self, tmp_path):
        from concurrent.futures import ThreadPoolExecutor

        backend = MockReplayBackend(["A"])
        cache = ResponseCache(tmp_path / "cache")
        params = DecodingParams()
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: complete(backend, "x", params, cache=cache), range(32)))
        assert all(r == ["A"] for r in results)
        # exactly one cache entry, fully formed (atomic write contract)
        [path] = list((tmp_path / "cache").glob("*.json"))
        assert json.loads(path.read_text())["responses"] == ["A"]

    def test_retry_exhaustion_raises_last_error(self):
        class Down:
            model_name = "down"
            retry = RetryPolicy(attempts=3, sleep=lambda _: None)
            calls = 0

            def complete_once(self, prompt, params):
                Down.calls += 1
                raise RateLimited("always")

        with pytest.raises(RateLimited):
            complete(Down(), "x", DecodingParams())
        assert Down.calls == 3


class TestRemoteBackend:
    def test_returns_n_samples(self, fixture_server):
        backend = RemoteBackend(fixture_server.url("/chat"), "test-model")
        texts = backend.complete_once("hello", DecodingParams(n_samples=3))
        assert len(texts) == 3
        assert texts[0].startswith("echo 0 ")

    def test_rate_limit_retried_then_succeeds(self, fixture_server):
        backend = RemoteBackend(fixture_server.url("/chat-flaky/t1"), "test-model")
        backend.retry = RetryPolicy(attempts=3, sleep=lambda _: None)
        assert complete(backend, "hello", DecodingParams())[0].startswith("echo 0 ")

    def test_server_error_becomes_backend_unavailable(self, fixture_server):
        backend = RemoteBackend(fixture_server.url("/chat-down"), "test-model")
        backend.retry = RetryPolicy(attempts=2, sleep=lambda _: None)
        with pytest.raises(BackendUnavailable):
            complete(backend, "hello", DecodingParams())

    def test_unroutable_endpoint_is_unavailable(self):
        backend = RemoteBackend("http://nonexistent-host.invalid/chat", "m", timeout_s=2.0)
        backend.retry = RetryPolicy(attempts=1, sleep=lambda _: None)
        with pytest.raises(BackendUnavailable):
            complete(backend, "hello", DecodingParams())


class TestExtractStructuredList:
    def test_wrapper_prose_is_tolerated(self):
        records = extract_structured_list(
            'Here you go: [{"sentence":"s","reason":"r","correction":"c"}]',
            ["sentence", "reason", "correction"],
        )
        assert records == [{"sentence": "s", "reason": "r", "correction": "c"}]

    def test_yes_no_normalization_is_case_insensitive(self):
        [record] = extract_structured_list(
            '[{"error":"e","response":"yes","correction":"No","supporting_links":"Yes"}]',
            ["error", "response", "correction", "supporting_links"],
        )
        assert record == {"error": "e", "response": True, "correction": False, "supporting_links": True}

    def test_refusal_prose_has_no_structure(self):
        with pytest.raises(NoStructurePresent):
            extract_structured_list("Sorry, I cannot", ["a"])

    def test_code_fences_are_tolerated(self):
        text = 'Sure!\n```json\n[{"a": "1"}]\n```\nDone.'
        assert extract_structured_list(text, ["a"]) == [{"a": "1"}]

    def test_python_literal_syntax_is_accepted(self):
        text = "[{'a': 'x'}, {'a': 'y'}]"
        assert extract_structured_list(text, ["a"]) == [{"a": "x"}, {"a": "y"}]

    def test_first_record_list_wins_over_later_ones(self):
        text = 'ignore [1, 2] then [{"a": "first"}] then [{"a": "second"}]'
        assert extract_structured_list(text, ["a"]) == [{"a": "first"}]

    def test_empty_list_is_valid(self):
        assert extract_structured_list("nothing wrong: []", ["a"]) == []

    def test_key_mismatch_reports_missing_and_extra(self):
        with pytest.raises(KeyMismatch) as excinfo:
            extract_structured_list('[{"a": "1", "z": "2"}]', ["a", "b"])
        assert excinfo.value.missing == {"b"}
        assert excinfo.value.extra == {"z"}
        assert excinfo.value.index == 0

    @settings(max_examples=300)
    @given(st.text(max_size=200))
    def test_total_on_arbitrary_text(self, text):
        try:
            result = extract_structured_list(text, ["a", "b"])
        except (NoStructurePresent, KeyMismatch):
            return
        assert isinstance(result, list)

    @settings(max_examples=100)
    @given(
        st.lists(
            st.fixed_dictionaries(
                {"a": st.sampled_from(["Yes", "no", "text"]), "b": st.text(alphabet="xyz ", max_size=8)}
            ),
            max_size=4,
        ),
        st.text(alphabet="abc []{}'\"\n", max_size=30),
        st.text(alphabet="abc []{}'\"\n", max_size=30),
    )
    def test_roundtrip_with_noise(self, records, prefix, suffix):
        # a well-formed JSON list embedded in noise must parse unless the
        # noise itself contains an earlier well-formed record list
        payload = json.dumps(records)
        try:
            parsed = extract_structured_list(prefix + payload + suffix, ["a", "b"])
        except (NoStructurePresent, KeyMismatch):
            return
        assert isinstance(parsed, list)
