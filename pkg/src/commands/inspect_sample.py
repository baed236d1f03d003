import torch

from learning.sequences import TASKS, build_input, format_target
from learning.trainer import decode_heads, load_checkpoint, restore_models
from lsa import LinguisticAlignment
from utils.config import RunConfig
from utils.errors import ConfigError, SequenceError
from utils.log import get_logger
from utils.register import register_class
from .base import EXIT_COMPLETE, Command
from .common import build_component, load_samples, run_config, seed_everything

logger = get_logger("commands")


@register_class(alias="Command.Inspect")
class Inspect(Command):
    """Print one sample as the model sees it: task inputs, targets, patch selection and decoded heads."""

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--dataset", type=str, default="data/toy")
        parser.add_argument("--split", type=str, default="train")
        parser.add_argument("--id", type=str, default=None, help="sample id; the first sample when omitted")
        parser.add_argument("--seed", type=int, default=42)
        parser.add_argument("--checkpoint", type=str, default=None, help="decode every head with this model")
        parser.add_argument("--features", type=str, default="Features.Synthetic")

    def run(self):
        args = self.args
        state = load_checkpoint(args.checkpoint) if args.checkpoint else None
        config = RunConfig(**state["config"]).with_overrides(dataset=args.dataset) if state else run_config(args)
        seed_everything(config.seed)
        samples = load_samples(config.dataset, args.split)
        sample = next((s for s in samples if args.id is None or s.id == args.id), None)
        if sample is None:
            raise ConfigError(f"no sample {args.id!r} in {config.dataset}/{args.split}")

        print(f"id: {sample.id}  image: {sample.image}  label: {sample.label}")
        print(f"sentence: {sample.sentence}")
        print(f"target: {sample.target}  object: {sample.object.object_id if sample.object else '-'}"
              f"  od_kind: {sample.od_kind or '-'}")
        for task in TASKS:
            try:
                print(f"[{task}] input:  {build_input(task, sample, config.enable_od, config.enable_aes_cap, config.aesthetic_vs_generic_caption)}")
                rationale = {"SC": None, "SRG": sample.sr, "IRG": sample.ir}[task]
                if task == "SC" or rationale:
                    print(f"[{task}] target: {format_target(task, sample.label, rationale)}")
            except SequenceError as e:
                print(f"[{task}] unavailable: {e}")

        features = build_component(args, args.features)
        backbone, lsa = restore_models(state) if state else (None, None)
        if lsa is None:
            lsa = LinguisticAlignment.from_config(config, dim=features.dim, max_patches=features.num_patches)
        lsa.eval()
        patches = features.image_features(sample.image)
        with torch.no_grad():
            calibrated, scores, mask = lsa.calibrate_one(patches, features.text_features(sample.sentence))
        keep = "".join("1" if k > 0.5 else "0" for k in mask.hard.tolist())
        print(f"patch selection: {keep} ({len(mask.kept_index)}/{patches.n} kept)")
        print(f"p_f: {', '.join(f'{v:.3f}' for v in scores.p_f.detach().tolist())}")
        print(f"calibrated sequence length: {calibrated.length}"
              + (" (no redundant patches)" if calibrated.redundant_empty else ""))

        if backbone is not None:
            heads = [h for h in TASKS if h == "SC" or getattr(config, f"enable_{h.lower()}")]
            outputs = decode_heads(backbone, [sample], config, heads, lsa, features)
            for head, preds in outputs.items():
                rationale = f"  rationale: {preds[0].rationale}" if preds[0].rationale else ""
                print(f"[{head}] decoded: {preds[0].sentiment}{rationale}")
        return EXIT_COMPLETE
