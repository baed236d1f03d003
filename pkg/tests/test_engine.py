import pytest

from engine import Engine, MockEngine, RateLimited
from utils.errors import ClientError

MESSAGES = [{"role": "system", "content": "sys"}, {"role": "user", "content": "hello"}]


class Throttled(Engine):
    model_id = "throttled"

    def __init__(self, throttle_times, **kwargs):
        super().__init__(**kwargs)
        self.throttle_times = throttle_times
        self.calls = 0
        self.sleeps = []

    def _sleep(self, seconds):
        self.sleeps.append(seconds)

    def _complete(self, messages, image=None):
        self.calls += 1
        if self.calls <= self.throttle_times:
            raise RateLimited("429")
        return "ok"


def test_echo_and_fixed_modes():
    assert MockEngine("echo").get_response(MESSAGES) == "hello"
    assert MockEngine("fixed:<sen> positive </sen>").get_response(MESSAGES) == "<sen> positive </sen>"


def test_flaky_engine_recovers():
    engine = MockEngine("flaky:2", max_retries=3)
    assert engine.get_response(MESSAGES)
    assert engine.calls == 3


def test_failing_engine_raises_after_retries():
    engine = MockEngine("fail", max_retries=3)
    with pytest.raises(ClientError) as info:
        engine.get_response(MESSAGES)
    assert info.value.attempts == 3
    assert engine.calls == 3


def test_rate_limit_waits_at_least_the_floor():
    engine = Throttled(2, max_retries=3, backoff=2.0, rate_limit_backoff=10.0)
    assert engine.get_response(MESSAGES) == "ok"
    assert engine.sleeps == [10.0, 10.0]


def test_backoff_is_exponential_and_skips_the_last_sleep():
    engine = Throttled(5, max_retries=3, backoff=2.0, rate_limit_backoff=0.0)
    with pytest.raises(ClientError):
        engine.get_response(MESSAGES)
    assert engine.sleeps == [2.0, 4.0]


def test_images_are_passed_through():
    engine = MockEngine()
    engine.get_response(MESSAGES, image="aGVsbG8=")
    assert engine.images == ["aGVsbG8="]


def test_image_loader_builds_typed_data_urls(tmp_path):
    from commands.common import image_loader

    (tmp_path / "a.png").write_bytes(b"hello")
    (tmp_path / "b.jpg").write_bytes(b"hello")
    load = image_loader(str(tmp_path))
    assert load("a.png") == "data:image/png;base64,aGVsbG8="
    assert load("b.jpg") == "data:image/jpeg;base64,aGVsbG8="


def test_gpt_sends_the_data_url_unchanged():
    pytest.importorskip("openai")
    from engine.gpt import GPTEngine

    messages = GPTEngine.attach_image(MESSAGES, "data:image/png;base64,aGVsbG8=")
    assert messages[-1]["content"][1] == {"type": "image_url", "image_url": {"url": "data:image/png;base64,aGVsbG8="}}
    assert MESSAGES[-1]["content"] == "hello"


class DashScopeReply(dict):
    def __init__(self, status_code, text="", message=""):
        super().__init__(output={"choices": [{"message": {"content": [{"text": text}]}}]})
        self.status_code = status_code
        self.code = str(status_code)
        self.message = message


def test_qwen_sends_the_image_to_the_multimodal_endpoint(monkeypatch):
    dashscope = pytest.importorskip("dashscope")
    from engine.qwen import QwenEngine

    calls = []

    def call(**kwargs):
        calls.append(kwargs)
        return DashScopeReply(200, text="<sen> positive </sen>")

    monkeypatch.setattr(dashscope.MultiModalConversation, "call", call)
    engine = QwenEngine(api_key="key", max_retries=1)
    assert engine.get_response(MESSAGES, image="data:image/png;base64,aGVsbG8=") == "<sen> positive </sen>"
    sent = calls[0]["messages"]
    assert calls[0]["model"] == "qwen-vl-max"
    assert sent[0]["content"] == [{"text": "sys"}]
    assert sent[-1]["content"] == [{"image": "data:image/png;base64,aGVsbG8="}, {"text": "hello"}]


def test_qwen_without_an_image_sends_text_only():
    pytest.importorskip("dashscope")
    from engine.qwen import QwenEngine

    assert QwenEngine.to_multimodal(MESSAGES)[-1]["content"] == [{"text": "hello"}]
