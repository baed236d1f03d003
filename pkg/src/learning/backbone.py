import torch
import torch.nn as nn
from torch.nn.utils.rnn import pad_sequence

from utils.register import register_class
from .losses import generation_loss
from .tokenizer import WordTokenizer


@register_class(alias="Backbone.Base")
class Seq2SeqBackbone(nn.Module):
    """Text-in, text-out encoder-decoder.

    `loss(inputs, targets, visual=None)` is the generation loss of the gold
    targets under teacher forcing; `generate(inputs, visual=None)` decodes
    greedily. `visual` is an optional list of (L_i, d) feature rows prepended
    to each encoder input.
    """

    @staticmethod
    def add_parser_args(parser):
        pass

    def loss(self, inputs, targets, visual=None):
        raise NotImplementedError

    def generate(self, inputs, visual=None, max_len=None):
        raise NotImplementedError

    def extra_state(self):
        return {}


@register_class(alias="Backbone.Tiny")
class TinySeq2Seq(Seq2SeqBackbone):
    """Small Transformer encoder-decoder over a corpus-built word vocabulary."""

    def __init__(self, tokenizer, d_model=64, nhead=4, num_layers=2, dim_feedforward=128,
                 max_len=128, feature_dim=None, max_target_len=None):
        super().__init__()
        self.tokenizer = tokenizer
        self.max_len = max_len
        # decoding may run as long as any target training accepts
        self.max_target_len = max_target_len or max_len - 1
        self.hparams = {
            "d_model": d_model, "nhead": nhead, "num_layers": num_layers,
            "dim_feedforward": dim_feedforward, "max_len": max_len,
            "feature_dim": feature_dim, "max_target_len": self.max_target_len,
        }
        self.embed = nn.Embedding(len(tokenizer), d_model, padding_idx=tokenizer.pad_id)
        self.position = nn.Embedding(max_len, d_model)
        self.transformer = nn.Transformer(
            d_model=d_model,
            nhead=nhead,
            num_encoder_layers=num_layers,
            num_decoder_layers=num_layers,
            dim_feedforward=dim_feedforward,
            dropout=0.0,
            batch_first=True,
        )
        self.out = nn.Linear(d_model, len(tokenizer))
        self.visual_proj = nn.Linear(feature_dim, d_model) if feature_dim else None

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--d_model", type=int, default=64)
        parser.add_argument("--nhead", type=int, default=4)
        parser.add_argument("--num_layers", type=int, default=2)
        parser.add_argument("--dim_feedforward", type=int, default=128)
        parser.add_argument("--max_len", type=int, default=128, help="max encoder/decoder positions")

    @classmethod
    def from_args(cls, args, texts, feature_dim=None):
        return cls(
            WordTokenizer.build(texts),
            d_model=args.d_model,
            nhead=args.nhead,
            num_layers=args.num_layers,
            dim_feedforward=args.dim_feedforward,
            max_len=args.max_len,
            feature_dim=feature_dim,
        )

    def extra_state(self):
        return {"tokenizer": self.tokenizer.state_dict(), "hparams": self.hparams}

    @classmethod
    def from_extra_state(cls, state):
        return cls(WordTokenizer.from_state_dict(state["tokenizer"]), **state["hparams"])

    def _batch(self, texts, add_bos=False):
        rows = []
        for text in texts:
            ids = self.tokenizer.encode(text)[: self.max_len - (1 if add_bos else 0)]
            if add_bos:
                ids = [self.tokenizer.bos_id] + ids
            rows.append(torch.tensor(ids, dtype=torch.long))
        ids = pad_sequence(rows, batch_first=True, padding_value=self.tokenizer.pad_id)
        return ids, ids == self.tokenizer.pad_id

    def _embed(self, ids):
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        return self.embed(ids) + self.position(positions)

    def _encode(self, inputs, visual=None):
        src, src_pad = self._batch(inputs)
        src_emb = self._embed(src)
        if visual is not None and self.visual_proj is not None:
            vis = pad_sequence([self.visual_proj(v) for v in visual], batch_first=True)
            vis_pad = pad_sequence(
                [torch.zeros(v.size(0), dtype=torch.bool) for v in visual], batch_first=True, padding_value=True)
            src_emb = torch.cat([vis, src_emb], dim=1)
            src_pad = torch.cat([vis_pad, src_pad], dim=1)
        memory = self.transformer.encoder(src_emb, src_key_padding_mask=src_pad)
        return memory, src_pad

    def _decode(self, tgt_in, memory, src_pad):
        causal = self.transformer.generate_square_subsequent_mask(tgt_in.size(1)).to(memory.device)
        hidden = self.transformer.decoder(
            self._embed(tgt_in),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_in == self.tokenizer.pad_id,
            memory_key_padding_mask=src_pad,
        )
        return self.out(hidden)

    def loss(self, inputs, targets, visual=None):
        memory, src_pad = self._encode(inputs, visual)
        gold, gold_pad = self._batch(targets)
        bos = torch.full((gold.size(0), 1), self.tokenizer.bos_id, dtype=torch.long)
        tgt_in = torch.cat([bos, gold[:, :-1]], dim=1)
        logits = self._decode(tgt_in, memory, src_pad)
        return generation_loss(logits, gold, mask=~gold_pad)

    @torch.no_grad()
    def generate(self, inputs, visual=None, max_len=None):
        max_len = max_len or self.max_target_len
        memory, src_pad = self._encode(inputs, visual)
        out = torch.full((len(inputs), 1), self.tokenizer.bos_id, dtype=torch.long)
        done = torch.zeros(len(inputs), dtype=torch.bool)
        for _ in range(min(max_len, self.max_len - 1)):
            logits = self._decode(out, memory, src_pad)
            step = logits[:, -1].argmax(dim=-1)
            step = step.masked_fill(done, self.tokenizer.pad_id)
            out = torch.cat([out, step.unsqueeze(1)], dim=1)
            done = done | (step == self.tokenizer.eos_id)
            if bool(done.all()):
                break
        return [self.tokenizer.decode(row[1:].tolist()) for row in out]
