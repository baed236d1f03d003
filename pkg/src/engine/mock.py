import re
import threading

from utils.register import register_class
from .base_engine import Engine

STEM_PATTERN = re.compile(r"(Based on the image-text pair, the sentiment towards .+? is \w+ because)")


@register_class(alias="Engine.Mock")
class MockEngine(Engine):
    """Offline engine for tests and dry runs.

    Modes:
      echo      reply with the last user message
      obey      follow the response stem when the prompt demands one
      fixed:T   always reply T
      fail      every attempt raises
      flaky:N   the first N attempts raise, later ones behave like obey
    """

    def __init__(self, mode="obey", model_id="mock", **kwargs):
        kwargs.setdefault("backoff", 0.0)
        kwargs.setdefault("rate_limit_backoff", 0.0)
        super().__init__(**kwargs)
        self.mode = mode
        self.model_id = model_id
        self.calls = 0
        self.images = []
        self._lock = threading.Lock()

    @staticmethod
    def add_parser_args(parser):
        Engine.add_parser_args(parser)
        parser.add_argument("--mock_mode", type=str, default="obey", help="echo | obey | fixed:TEXT | fail | flaky:N")

    @classmethod
    def from_args(cls, args):
        return cls(mode=args.mock_mode, max_retries=args.max_retries, backoff=0.0)

    def _complete(self, messages, image=None):
        with self._lock:
            self.calls += 1
            attempt = self.calls
            self.images.append(image)
        user_text = messages[-1]["content"]

        if self.mode == "fail":
            raise RuntimeError("mock engine configured to fail")
        if self.mode.startswith("flaky:") and attempt <= int(self.mode.split(":", 1)[1]):
            raise RuntimeError(f"mock engine transient failure {attempt}")
        if self.mode == "echo":
            return user_text
        if self.mode.startswith("fixed:"):
            return self.mode.split(":", 1)[1]

        match = STEM_PATTERN.search(user_text)
        if match:
            return f"{match.group(1)} the wording and the picture point the same way."
        return "The image leaves a calm and balanced overall impression."
