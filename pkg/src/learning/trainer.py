import io
import os
import random

import torch
from tqdm import tqdm

from evaluation.metrics import accuracy_f1
from features.base import stable_seed
from lsa.module import LinguisticAlignment
from utils.errors import TrainingError
from utils.io import append_jsonl, atomic_write_bytes, write_json
from utils.log import get_logger
from utils.register import registry
from .losses import LossWeights, is_finite, total_loss
from .sequences import TASKS, build_input, parse_output, task_sequences

logger = get_logger("learning")

LOSS_KEYS = {"SC": "loss_sc", "SRG": "loss_srg", "IRG": "loss_irg"}
SC_MAX_LEN = 8


def save_checkpoint(path, state):
    buffer = io.BytesIO()
    torch.save(state, buffer)
    atomic_write_bytes(path, buffer.getvalue())


def load_checkpoint(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"checkpoint not found: {path}")
    return torch.load(path, map_location="cpu", weights_only=False)


def restore_models(state):
    """Rebuild (backbone, lsa) from a checkpoint; lsa is None when the run had none."""
    backbone = registry.get_class(state["config"]["backbone"]).from_extra_state(state["backbone_extra"])
    backbone.load_state_dict(state["model"])
    lsa = None
    if state.get("lsa") is not None:
        config = state["config"]
        lsa = LinguisticAlignment(
            dim=state["lsa_dims"]["dim"],
            max_patches=state["lsa_dims"]["max_patches"],
            beta=config["beta"], tau=config["tau"], gamma=config["gamma"], n_f=config["n_f"],
            gumbel_form=config["gumbel_form"], k_form=config["k_form"],
        )
        lsa.load_state_dict(state["lsa"])
    return backbone, lsa


class MultiTaskTrainer:
    """Joint SC/SRG/IRG generation plus patch-token alignment, one optimizer step per batch."""

    def __init__(self, config, backbone, features, lsa=None, output_dir=None):
        self.config = config
        self.backbone = backbone
        self.features = features
        self.lsa = lsa
        self.output_dir = output_dir or config.output_dir
        self.weights = LossWeights(config.alpha, config.lam)
        params = list(backbone.parameters())
        if lsa is not None:
            params += list(lsa.parameters())
        self.params = params
        self.optimizer = torch.optim.AdamW(params, lr=config.lr)
        self.epoch = 0
        self.global_step = 0
        self.best = None
        self.step_totals = []
        self._feature_cache = {}

    @property
    def metrics_path(self):
        return os.path.join(self.output_dir, "metrics.jsonl")

    def pair_features(self, sample):
        if sample.id not in self._feature_cache:
            self._feature_cache[sample.id] = (
                self.features.image_features(sample.image),
                self.features.text_features(sample.sentence),
            )
        return self._feature_cache[sample.id]

    def _visual(self, batch, seeds):
        """(L_align or None, calibrated rows per sample or None)."""
        if self.lsa is None or not (self.config.enable_lsa or self.config.prepend_visual):
            return None, None
        pairs = [self.pair_features(s) for s in batch]
        loss, calibrated = self.lsa.align([p for p, _ in pairs], [t for _, t in pairs], seeds)
        visual = [c.sequence() for c in calibrated] if self.config.prepend_visual else None
        return (loss if self.config.enable_lsa else None), visual

    def batch_losses(self, batch):
        seeds = [stable_seed(self.config.seed, self.global_step, s.id) for s in batch]
        l_align, visual = self._visual(batch, seeds)
        per_task = {}
        sequences = [task_sequences(s, self.config) for s in batch]
        for i, task in enumerate(t.task for t in sequences[0]):
            inputs = [seqs[i].input_text for seqs in sequences]
            targets = [seqs[i].target_text for seqs in sequences]
            per_task[task] = self.backbone.loss(inputs, targets, visual)
        total = total_loss(per_task["SC"], per_task.get("SRG"), per_task.get("IRG"), l_align, self.weights)
        components = {LOSS_KEYS[task]: loss for task, loss in per_task.items()}
        if l_align is not None:
            components["loss_align"] = l_align
        return total, components

    def train_step(self, batch):
        self.backbone.train()
        if self.lsa is not None:
            self.lsa.train()
        total, components = self.batch_losses(batch)
        values = {k: float(v.detach()) for k, v in components.items()}
        values["loss_total"] = float(total.detach())
        if not is_finite(total):
            raise TrainingError(
                f"non-finite loss at epoch {self.epoch + 1}, step {self.global_step}",
                diagnostics={"epoch": self.epoch + 1, "global_step": self.global_step,
                             "components": values, "sample_ids": [s.id for s in batch]},
            )
        self.optimizer.zero_grad()
        total.backward()
        torch.nn.utils.clip_grad_norm_(self.params, self.config.max_grad_norm)
        self.optimizer.step()
        self.global_step += 1
        self.step_totals.append(values["loss_total"])
        return values

    def _batches(self, samples, epoch):
        order = list(range(len(samples)))
        random.Random(stable_seed(self.config.seed, "shuffle", epoch)).shuffle(order)
        size = self.config.batch
        return [[samples[i] for i in order[k:k + size]] for k in range(0, len(order), size)]

    def fit(self, train_samples, dev_samples=()):
        os.makedirs(self.output_dir, exist_ok=True)
        self.config.save(self.output_dir)
        for epoch in range(self.epoch, self.config.epochs):
            self.epoch = epoch
            sums, steps = {}, 0
            for batch in tqdm(self._batches(train_samples, epoch), desc=f"epoch {epoch + 1}", leave=False):
                for key, value in self.train_step(batch).items():
                    sums[key] = sums.get(key, 0.0) + value
                steps += 1
            row = {"epoch": epoch + 1, "split": "train", "global_step": self.global_step}
            row.update({k: v / max(steps, 1) for k, v in sums.items()})
            append_jsonl(self.metrics_path, row)
            logger.info(f"epoch {epoch + 1}: loss {row.get('loss_total', 0.0):.4f}")

            dev_report = None
            if dev_samples:
                preds = self.decode(dev_samples, heads=("SC",))["SC"]
                dev_report = accuracy_f1(preds, [s.label for s in dev_samples], self.config.f1_average)
                append_jsonl(self.metrics_path, {
                    "epoch": epoch + 1, "split": "dev", "global_step": self.global_step,
                    "acc": dev_report.acc, "f1": dev_report.f1, "f1_macro": dev_report.f1_macro,
                    "f1_micro": dev_report.f1_micro, "dis_rate": dev_report.dis_rate,
                })
                logger.info(f"epoch {epoch + 1}: dev acc {dev_report.acc:.4f} f1 {dev_report.f1:.4f}")

            self.epoch = epoch + 1
            self._checkpoint(dev_report)
        return self.step_totals

    def _improved(self, report):
        if report is None:
            return True
        if self.best is None:
            return True
        return (report.acc, report.f1) > (self.best["acc"], self.best["f1"])

    def state(self):
        return {
            "model": self.backbone.state_dict(),
            "backbone_extra": self.backbone.extra_state(),
            "lsa": self.lsa.state_dict() if self.lsa is not None else None,
            "lsa_dims": {"dim": self.lsa.dim, "max_patches": self.features.num_patches} if self.lsa is not None else None,
            "optimizer": self.optimizer.state_dict(),
            "config": self.config.to_dict(),
            "seed": self.config.seed,
            "epoch": self.epoch,
            "global_step": self.global_step,
            "best": self.best,
        }

    def _checkpoint(self, report):
        save_checkpoint(os.path.join(self.output_dir, "last.pt"), self.state())
        if self._improved(report):
            self.best = {"epoch": self.epoch, "acc": report.acc if report else None,
                         "f1": report.f1 if report else None, "path": "best.pt"}
            save_checkpoint(os.path.join(self.output_dir, "best.pt"), self.state())
            write_json(os.path.join(self.output_dir, "best.json"), self.best)

    def load_weights(self, path):
        state = load_checkpoint(path)
        self.backbone.load_state_dict(state["model"])
        if self.lsa is not None and state.get("lsa") is not None:
            self.lsa.load_state_dict(state["lsa"])
        return state

    def resume(self, path):
        state = self.load_weights(path)
        self.optimizer.load_state_dict(state["optimizer"])
        self.epoch = state["epoch"]
        self.global_step = state["global_step"]
        self.best = state.get("best")
        logger.info(f"resumed from {path} at epoch {self.epoch}, step {self.global_step}")
        return self

    def decode(self, samples, heads=TASKS):
        return decode_heads(self.backbone, samples, self.config, heads, self.lsa, self.features)


def calibrated_visual(lsa, features, samples):
    rows = []
    for sample in samples:
        calibrated = lsa.calibrate_one(features.image_features(sample.image), features.text_features(sample.sentence))[0]
        rows.append(calibrated.sequence())
    return rows


@torch.no_grad()
def decode_heads(backbone, samples, config, heads=TASKS, lsa=None, features=None, batch_size=16):
    """Greedy outputs of each requested head, parsed; {head: [ParsedOutput]} in sample order."""
    backbone.eval()
    if lsa is not None:
        lsa.eval()
    outputs = {head: [] for head in heads}
    for k in range(0, len(samples), batch_size):
        chunk = samples[k:k + batch_size]
        visual = None
        if config.prepend_visual and lsa is not None and features is not None:
            visual = calibrated_visual(lsa, features, chunk)
        for head in heads:
            inputs = [build_input(head, s, config.enable_od, config.enable_aes_cap,
                                  config.aesthetic_vs_generic_caption) for s in chunk]
            texts = backbone.generate(inputs, visual, max_len=SC_MAX_LEN if head == "SC" else None)
            outputs[head].extend(parse_output(head, t) for t in texts)
    return outputs
