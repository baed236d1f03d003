import os

from evaluation import (
    evaluation_report,
    load_lexicon,
    render_metric_table,
    write_histogram_csv,
    zero_shot_predictions,
)
from evaluation.analysis import DEFAULT_LEXICON_PATH, IntensityHistogram
from evaluation.metrics import accuracy_f1
from learning.sequences import TASKS
from learning.trainer import decode_heads, load_checkpoint, restore_models
from utils.config import RunConfig
from utils.errors import ConfigError
from utils.io import write_json, write_jsonl
from utils.log import get_logger
from utils.register import register_class
from .base import EXIT_COMPLETE, Command
from .common import build_component, image_loader, load_samples, seed_everything

logger = get_logger("commands")


def prediction_rows(samples, outputs):
    rows = []
    for i, sample in enumerate(samples):
        row = {"id": sample.id, "label": sample.label}
        for head, preds in outputs.items():
            row[head.lower()] = preds[i].sentiment
            if preds[i].rationale is not None:
                row[f"{head.lower()}_rationale"] = preds[i].rationale
        rows.append(row)
    return rows


@register_class(alias="Command.Evaluate")
class Evaluate(Command):
    """Score a checkpoint on one split, or an LLM zero-shot with --zero_shot."""

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--checkpoint", type=str, default=None, help="best.pt or last.pt of a training run")
        parser.add_argument("--dataset", type=str, default=None, help="defaults to the checkpoint's dataset")
        parser.add_argument("--split", type=str, default="test")
        parser.add_argument("--seed", type=int, default=None, help="defaults to the checkpoint's seed")
        parser.add_argument("--output_dir", type=str, default=None, help="defaults to <checkpoint dir>/eval_<split>")
        parser.add_argument("--features", type=str, default="Features.Synthetic",
                            help="feature provider for runs that prepend visual rows")
        parser.add_argument("--zero_shot", action="store_true", help="ask --engine directly instead of a checkpoint")
        parser.add_argument("--engine", type=str, default="Engine.Mock")
        parser.add_argument("--image_dir", type=str, default=None, help="send images to the zero-shot engine")
        parser.add_argument("--max_workers", type=int, default=4)
        parser.add_argument("--scorer", type=str, default="Scorer.Lexicon", help="sentiment intensity scorer")
        parser.add_argument("--lexicon", type=str, default=DEFAULT_LEXICON_PATH, help="aesthetic word list")
        parser.add_argument("--top_k", type=int, default=15)
        parser.add_argument("--bins", type=int, default=20)
        parser.add_argument("--bootstrap_iterations", type=int, default=1000)
        parser.add_argument("--f1_average", type=str, default=None, choices=["macro", "micro"])

    def run(self):
        if self.args.zero_shot:
            return self.run_zero_shot()
        return self.run_checkpoint()

    def _config(self, base):
        args = self.args
        overrides = {}
        if args.dataset:
            overrides["dataset"] = args.dataset
        if args.f1_average:
            overrides["f1_average"] = args.f1_average
        config = base.with_overrides(**overrides) if overrides else base
        if args.seed is None:
            args.seed = config.seed
        return config.validate(require_dataset=True)

    def run_checkpoint(self):
        args = self.args
        if not args.checkpoint:
            raise ConfigError("--checkpoint is required unless --zero_shot is set")
        state = load_checkpoint(args.checkpoint)
        config = self._config(RunConfig(**state["config"]))
        seed_everything(config.seed)
        samples = load_samples(config.dataset, args.split)
        backbone, lsa = restore_models(state)
        features = build_component(args, args.features) if config.prepend_visual else None
        heads = [h for h in TASKS if h == "SC" or getattr(config, f"enable_{h.lower()}")]
        outputs = decode_heads(backbone, samples, config, heads, lsa, features)

        output_dir = args.output_dir or os.path.join(os.path.dirname(os.path.abspath(args.checkpoint)),
                                                     f"eval_{args.split}")
        report = evaluation_report(
            outputs, [s.label for s in samples],
            average=config.f1_average,
            scorer=build_component(args, args.scorer),
            lexicon=load_lexicon(args.lexicon),
            k=args.top_k,
            bins=args.bins,
            bootstrap_iterations=args.bootstrap_iterations,
            seed=config.seed,
        )
        report["split"] = args.split
        report["checkpoint_epoch"] = state["epoch"]
        self._write(output_dir, config, samples, outputs, report)
        return EXIT_COMPLETE

    def run_zero_shot(self):
        args = self.args
        config = self._config(RunConfig(dataset=args.dataset or RunConfig.dataset, engine=args.engine,
                                        seed=args.seed if args.seed is not None else RunConfig.seed))
        samples = load_samples(config.dataset, args.split)
        engine = build_component(args, args.engine)
        preds = zero_shot_predictions(samples, engine, image_loader(args.image_dir) if args.image_dir else None,
                                      max_workers=args.max_workers)
        output_dir = args.output_dir or os.path.join("outputs", f"zero_shot_{args.split}")
        report = {
            "split": args.split,
            "model_id": engine.model_id,
            "primary": accuracy_f1(preds, [s.label for s in samples], config.f1_average).to_dict(),
        }
        report["heads"] = {"SC": report["primary"]}
        self._write(output_dir, config, samples, {"SC": preds}, report)
        return EXIT_COMPLETE

    def _write(self, output_dir, config, samples, outputs, report):
        os.makedirs(output_dir, exist_ok=True)
        config.save(output_dir)
        write_json(os.path.join(output_dir, "report.json"), report)
        write_jsonl(os.path.join(output_dir, "predictions.jsonl"), prediction_rows(samples, outputs))
        for head, histogram in report.get("intensity", {}).items():
            write_histogram_csv(os.path.join(output_dir, f"intensity_{head.lower()}.csv"),
                                IntensityHistogram(**histogram))
        print(render_metric_table(report["heads"]))
        for head, ranked in report.get("aesthetic_words", {}).items():
            logger.info(f"{head} aesthetic words: " + ", ".join(f"{w} ({c})" for w, c in ranked))
        if report.get("acc_ci"):
            ci = report["acc_ci"]
            logger.info(f"SC accuracy 95% CI [{ci['lower']:.4f}, {ci['upper']:.4f}]")
        logger.info(f"report written to {output_dir}")
