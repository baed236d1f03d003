import os

import openai
from openai import OpenAI

from utils.register import register_class
from .base_engine import Engine, RateLimited


@register_class(alias="Engine.GPT")
class GPTEngine(Engine):
    def __init__(self, openai_api_key=None, openai_api_base=None, openai_model_name="gpt-4o",
                 temperature=0.0, max_tokens=256, top_p=1, **kwargs):
        super().__init__(**kwargs)
        openai_api_key = openai_api_key if openai_api_key is not None else os.environ.get("OPENAI_API_KEY")
        assert openai_api_key is not None, "set --openai_api_key or OPENAI_API_KEY"
        openai_api_base = openai_api_base if openai_api_base is not None else os.environ.get("OPENAI_API_BASE")

        self.model_id = openai_model_name
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.top_p = top_p

        if openai_api_base is not None:
            self.client = OpenAI(api_key=openai_api_key, base_url=openai_api_base)
        else:
            self.client = OpenAI(api_key=openai_api_key)

    @staticmethod
    def add_parser_args(parser):
        Engine.add_parser_args(parser)
        parser.add_argument("--openai_api_key", type=str, help="API key for OpenAI")
        parser.add_argument("--openai_api_base", type=str, help="API base for OpenAI")
        parser.add_argument("--openai_model_name", type=str, default="gpt-4o", help="API model name for OpenAI")
        parser.add_argument("--temperature", type=float, default=0.0)
        parser.add_argument("--max_tokens", type=int, default=256)

    @classmethod
    def from_args(cls, args):
        return cls(
            openai_api_key=args.openai_api_key,
            openai_api_base=args.openai_api_base,
            openai_model_name=args.openai_model_name,
            temperature=args.temperature,
            max_tokens=args.max_tokens,
            max_retries=args.max_retries,
            backoff=args.backoff,
        )

    @staticmethod
    def attach_image(messages, image):
        """Turn the last user message into a text + image_url content list; `image` is a data URL."""
        if image is None:
            return messages
        messages = [dict(m) for m in messages]
        last = messages[-1]
        last["content"] = [
            {"type": "text", "text": last["content"]},
            {"type": "image_url", "image_url": {"url": image}},
        ]
        return messages

    def _complete(self, messages, image=None):
        try:
            response = self.client.chat.completions.create(
                model=self.model_id,
                messages=self.attach_image(messages, image),
                temperature=self.temperature,
                max_tokens=self.max_tokens,
                top_p=self.top_p,
            )
        except openai.RateLimitError as e:
            raise RateLimited(str(e)) from e
        return response.choices[0].message.content
