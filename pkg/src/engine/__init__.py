from .base_engine import Engine, RateLimited
from .mock import MockEngine
from .gpt import GPTEngine

__all__ = ["Engine", "RateLimited", "MockEngine", "GPTEngine"]

try:
    from .qwen import QwenEngine
    __all__.append("QwenEngine")
except ImportError:
    pass
