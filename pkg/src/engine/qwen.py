import os
from http import HTTPStatus

import dashscope

from utils.register import register_class
from .base_engine import Engine, RateLimited


@register_class(alias="Engine.Qwen")
class QwenEngine(Engine):
    """DashScope multimodal chat; the image rides in the last user turn as a data URL."""

    def __init__(self, api_key=None, model_name="qwen-vl-max", seed=1, **kwargs):
        super().__init__(**kwargs)
        self.api_key = api_key if api_key is not None else os.environ.get("DASHSCOPE_API_KEY")
        self.model_id = model_name
        self.seed = seed

    @staticmethod
    def add_parser_args(parser):
        Engine.add_parser_args(parser)
        parser.add_argument("--qwen_api_key", type=str)
        parser.add_argument("--qwen_model_name", type=str, default="qwen-vl-max", help="a Qwen-VL model")

    @classmethod
    def from_args(cls, args):
        return cls(
            api_key=args.qwen_api_key,
            model_name=args.qwen_model_name,
            seed=args.seed,
            max_retries=args.max_retries,
            backoff=args.backoff,
        )

    @staticmethod
    def to_multimodal(messages, image=None):
        converted = [{"role": m["role"], "content": [{"text": m["content"]}]} for m in messages]
        if image is not None:
            converted[-1]["content"].insert(0, {"image": image})
        return converted

    def _complete(self, messages, image=None):
        response = dashscope.MultiModalConversation.call(
            model=self.model_id,
            messages=self.to_multimodal(messages, image),
            seed=self.seed,
            api_key=self.api_key,
        )
        if response.status_code == HTTPStatus.TOO_MANY_REQUESTS:
            raise RateLimited(response.message)
        if response.status_code != HTTPStatus.OK:
            raise RuntimeError(f"{response.code}: {response.message}")
        content = response["output"]["choices"][0]["message"]["content"]
        if isinstance(content, str):
            return content
        return "".join(part.get("text", "") for part in content)
