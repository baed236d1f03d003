from evaluation.report import render_metric_table
from evaluation.stats import dataset_stats, flag_deviations, gold_rationale_quality, render_stats_table
from utils.io import write_json
from utils.log import get_logger
from utils.register import register_class
from .base import EXIT_COMPLETE, Command
from .common import add_dataset_args, load_samples, resolve_splits

logger = get_logger("commands")


@register_class(alias="Command.Stats")
class Stats(Command):
    """Per-split label counts and average text lengths, side by side.

    When rationales are attached, also scores how well SR/IR alone recover the gold labels.
    """

    @staticmethod
    def add_parser_args(parser):
        add_dataset_args(parser)
        parser.add_argument("--split", type=str, default="all")
        parser.add_argument("--output", type=str, default=None, help="also write the numbers as JSON")

    def run(self):
        args = self.args
        stats_by_split = {}
        quality = {}
        for split in resolve_splits(args.dataset, args.split):
            samples = load_samples(args.dataset, split)
            stats_by_split[split] = dataset_stats(samples)
            for flag in flag_deviations(stats_by_split[split]):
                logger.warning(f"{split}: {flag}")
            stats_by_split[split]["rationale_quality"] = gold_rationale_quality(samples)
            for kind, report in stats_by_split[split]["rationale_quality"].items():
                quality[f"{split} {kind}"] = report
        print(render_stats_table(stats_by_split))
        if quality:
            print(render_metric_table(quality))
        if args.output:
            write_json(args.output, stats_by_split)
        return EXIT_COMPLETE
