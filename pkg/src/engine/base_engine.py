import time
from abc import abstractmethod

from utils.errors import ClientError
from utils.log import get_logger
from utils.register import register_class

logger = get_logger("engine")


class RateLimited(Exception):
    """Raised by `_complete` implementations when the provider throttles the call."""


@register_class(alias="Engine.Base")
class Engine:
    """Chat-completion client.

    `get_response(messages, image=None)` takes a list of {"role", "content"}
    dicts and returns the reply text. Transient failures are retried with
    exponential backoff; exhausting the retries raises `ClientError`.
    """
    model_id = "base"

    def __init__(self, max_retries=3, backoff=2.0, rate_limit_backoff=10.0):
        self.max_retries = max_retries
        self.backoff = backoff
        self.rate_limit_backoff = rate_limit_backoff

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--max_retries", type=int, default=3, help="attempts per LLM call")
        parser.add_argument("--backoff", type=float, default=2.0, help="base seconds of exponential backoff")

    @classmethod
    def from_args(cls, args):
        return cls(max_retries=args.max_retries, backoff=args.backoff)

    @abstractmethod
    def _complete(self, messages, image=None):
        pass

    def _sleep(self, seconds):
        if seconds > 0:
            time.sleep(seconds)

    def wait_seconds(self, attempt, rate_limited=False):
        wait = self.backoff * 2 ** attempt
        return max(self.rate_limit_backoff, wait) if rate_limited else wait

    def get_response(self, messages, image=None):
        last_error = None
        for attempt in range(self.max_retries):
            try:
                return self._complete(messages, image=image)
            except RateLimited as e:
                last_error = e
                reason = f"rate limited by {self.model_id}: {e}"
                wait = self.wait_seconds(attempt, rate_limited=True)
            except Exception as e:
                last_error = e
                reason = f"{type(e).__name__}: {e}"
                wait = self.wait_seconds(attempt)
            if attempt + 1 < self.max_retries:
                logger.warning(f"[Retry {attempt + 1}/{self.max_retries}] {reason}. Sleeping {wait:.0f}s...")
                self._sleep(wait)
        raise ClientError(self.model_id, f"no response: {last_error}", attempts=self.max_retries)
