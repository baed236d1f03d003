import os

from learning.sequences import task_sequences
from learning.trainer import MultiTaskTrainer, decode_heads
from lsa import LinguisticAlignment
from evaluation.metrics import accuracy_f1
from utils.dataset import available_splits
from utils.errors import SequenceError, TrainingError
from utils.io import write_json
from utils.log import get_logger
from utils.register import register_class, registry
from .base import EXIT_COMPLETE, EXIT_FAILED, Command
from .common import add_run_args, build_component, load_samples, run_config, seed_everything

logger = get_logger("commands")


def vocabulary_texts(samples_by_split, config):
    texts = []
    for samples in samples_by_split.values():
        for sample in samples:
            try:
                sequences = task_sequences(sample, config)
            except SequenceError:
                # held-out samples without rationales contribute their inputs only
                sequences = task_sequences(sample, config, with_targets=False)
            for seq in sequences:
                texts.append(seq.input_text)
                if seq.target_text:
                    texts.append(seq.target_text)
    return texts


def build_models(args, config, features, samples_by_split):
    """(backbone, lsa); lsa is None when neither the alignment loss nor the visual prefix needs it."""
    feature_dim = features.dim if config.prepend_visual else None
    backbone_cls = registry.get_class(config.backbone)
    backbone = backbone_cls.from_args(args, vocabulary_texts(samples_by_split, config), feature_dim)
    lsa = None
    if config.enable_lsa or config.prepend_visual:
        lsa = LinguisticAlignment.from_config(config, dim=features.dim, max_patches=features.num_patches)
    return backbone, lsa


def train_and_evaluate(args, config, resume=None, eval_split="test"):
    """Fit on train (model selection on dev) and score the best checkpoint on `eval_split`.

    Returns the trainer and the test metrics dict, or None for the metrics
    when the split is absent.
    """
    seed_everything(config.seed)
    samples = {"train": load_samples(config.dataset, "train")}
    for split in available_splits(config.dataset):
        if split in ("dev", eval_split):
            samples[split] = load_samples(config.dataset, split)
    features = build_component(args, config.features)
    backbone, lsa = build_models(args, config, features, samples)
    trainer = MultiTaskTrainer(config, backbone, features, lsa=lsa)
    if resume:
        trainer.resume(resume)
    trainer.fit(samples["train"], samples.get("dev", ()))
    best = os.path.join(trainer.output_dir, "best.pt")
    if "dev" in samples and os.path.exists(best):
        trainer.load_weights(best)

    metrics = None
    if eval_split in samples:
        test = samples[eval_split]
        golds = [s.label for s in test]
        heads = [h.upper() for h in config.enabled_terms() if h != "align"]
        outputs = decode_heads(backbone, test, config, heads, lsa, features)
        metrics = {head: accuracy_f1(preds, golds, config.f1_average).to_dict() for head, preds in outputs.items()}
        write_json(os.path.join(trainer.output_dir, f"{eval_split}_metrics.json"), metrics)
        logger.info(f"{eval_split}: acc {metrics['SC']['acc']:.4f} f1 {metrics['SC']['f1']:.4f}")
    return trainer, metrics


@register_class(alias="Command.Train")
class Train(Command):
    """Multi-task fine-tuning with optional alignment loss; checkpoints land in --output_dir."""

    @staticmethod
    def add_parser_args(parser):
        add_run_args(parser)
        parser.add_argument("--resume", type=str, default=None, help="checkpoint to continue from")
        parser.add_argument("--ablate", type=str, default="",
                            help="comma-separated parts to switch off: srg,irg,lsa,od,aes_cap")

    def run(self):
        args = self.args
        config = run_config(args)
        tokens = [t.strip() for t in args.ablate.split(",") if t.strip()]
        if tokens:
            config = config.ablated(tokens)
        config.validate(require_dataset=True)
        logger.info(f"training terms: {', '.join(config.enabled_terms())}")
        try:
            train_and_evaluate(args, config, resume=args.resume)
        except TrainingError as e:
            logger.error(f"training stopped: {e}")
            write_json(os.path.join(config.output_dir, "failure.json"),
                       {"error": str(e), "diagnostics": e.diagnostics})
            return EXIT_FAILED
        return EXIT_COMPLETE
