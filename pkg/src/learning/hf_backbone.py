import torch
import torch.nn as nn

from utils.register import register_class
from .backbone import Seq2SeqBackbone
from .losses import generation_loss
from .sequences import MARKERS


@register_class(alias="Backbone.HF")
class HFSeq2Seq(Seq2SeqBackbone):
    """Pretrained encoder-decoder from transformers (Flan-T5 by default) with the task markers added."""

    def __init__(self, model_name_or_path="google/flan-t5-base", feature_dim=None, max_len=512, max_target_len=128):
        super().__init__()
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.model_name_or_path = model_name_or_path
        self.feature_dim = feature_dim
        self.max_len = max_len
        self.max_target_len = max_target_len
        self.tokenizer = AutoTokenizer.from_pretrained(model_name_or_path, use_fast=True)
        self.tokenizer.add_special_tokens({"additional_special_tokens": list(MARKERS)})
        self.model = AutoModelForSeq2SeqLM.from_pretrained(model_name_or_path)
        self.model.resize_token_embeddings(len(self.tokenizer))
        hidden = self.model.config.d_model
        self.visual_proj = nn.Linear(feature_dim, hidden) if feature_dim else None

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--hf_model_name_or_path", type=str, default="google/flan-t5-base")
        parser.add_argument("--max_len", type=int, default=512)

    @classmethod
    def from_args(cls, args, texts=None, feature_dim=None):
        return cls(args.hf_model_name_or_path, feature_dim=feature_dim, max_len=args.max_len)

    def extra_state(self):
        return {"hparams": {"model_name_or_path": self.model_name_or_path, "max_len": self.max_len,
                            "max_target_len": self.max_target_len, "feature_dim": self.feature_dim}}

    @classmethod
    def from_extra_state(cls, state):
        return cls(**state["hparams"])

    def _encoder_inputs(self, inputs, visual=None):
        batch = self.tokenizer(inputs, padding=True, truncation=True, max_length=self.max_len, return_tensors="pt")
        embeds = self.model.get_input_embeddings()(batch.input_ids)
        mask = batch.attention_mask
        if visual is not None and self.visual_proj is not None:
            width = max(v.size(0) for v in visual)
            prefix = torch.zeros(len(visual), width, embeds.size(-1))
            prefix_mask = torch.zeros(len(visual), width, dtype=mask.dtype)
            for i, v in enumerate(visual):
                prefix[i, : v.size(0)] = self.visual_proj(v)
                prefix_mask[i, : v.size(0)] = 1
            embeds = torch.cat([prefix, embeds], dim=1)
            mask = torch.cat([prefix_mask, mask], dim=1)
        return embeds, mask

    def loss(self, inputs, targets, visual=None):
        embeds, mask = self._encoder_inputs(inputs, visual)
        labels = self.tokenizer(targets, padding=True, truncation=True, max_length=self.max_target_len,
                                return_tensors="pt").input_ids
        gold_pad = labels == self.tokenizer.pad_token_id
        out = self.model(inputs_embeds=embeds, attention_mask=mask, labels=labels.masked_fill(gold_pad, -100))
        return generation_loss(out.logits, labels, mask=~gold_pad)

    @torch.no_grad()
    def generate(self, inputs, visual=None, max_len=None):
        embeds, mask = self._encoder_inputs(inputs, visual)
        out = self.model.generate(inputs_embeds=embeds, attention_mask=mask,
                                  max_new_tokens=max_len or self.max_target_len)
        texts = self.tokenizer.batch_decode(out, skip_special_tokens=False)
        return [t.replace(self.tokenizer.pad_token, "").replace(self.tokenizer.eos_token, "").strip() for t in texts]
