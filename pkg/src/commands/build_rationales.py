import os

from rationale import RationaleBuilder, attach_rationales, load_pools
from rationale.prompts import DEFAULT_POOL_PATH
from utils.cache import JsonCache
from utils.dataset import save_split
from utils.io import write_json, write_jsonl
from utils.log import get_logger
from utils.register import register_class
from .base import OUTCOME_CODES, Command
from .common import add_dataset_args, build_component, image_loader, load_samples, run_config

logger = get_logger("commands")


@register_class(alias="Command.BuildRationales")
class BuildRationales(Command):
    """Generate SR/IR rationales for one split through the configured engine."""

    @staticmethod
    def add_parser_args(parser):
        add_dataset_args(parser)
        parser.add_argument("--split", type=str, default="train")
        parser.add_argument("--engine", type=str, default="Engine.Mock", help="registry name of the LLM engine")
        parser.add_argument("--prompt_pool", type=str, default=DEFAULT_POOL_PATH)
        parser.add_argument("--cache_dir", type=str, default=None, help="defaults to <dataset>/cache/rationales")
        parser.add_argument("--output", type=str, default=None, help="defaults to <dataset>/rationales/<split>.jsonl")
        parser.add_argument("--max_workers", type=int, default=4, help="concurrent LLM calls")
        parser.add_argument("--budget", type=int, default=None, help="max LLM calls for this run")
        parser.add_argument("--image_dir", type=str, default=None, help="send images from this directory")
        parser.add_argument("--attach", action="store_true", help="write sr/ir back into the split file")

    def run(self):
        args = self.args
        config = run_config(args).validate(require_dataset=True)
        samples = load_samples(args.dataset, args.split)
        pools = load_pools(args.prompt_pool)
        engine = build_component(args, args.engine)
        cache = JsonCache(args.cache_dir or os.path.join(args.dataset, "cache", "rationales"))
        output = args.output or os.path.join(args.dataset, "rationales", f"{args.split}.jsonl")

        builder = RationaleBuilder(
            pools, engine, cache,
            seed=args.seed,
            max_workers=args.max_workers,
            budget=args.budget,
            image_loader=image_loader(args.image_dir) if args.image_dir else None,
        )
        records = builder.run(samples)
        ok = [r for r in records if r.status == "ok"]
        write_jsonl(output, [r.to_dict() for r in ok])
        summary = dict(builder.summary)
        summary.update({
            "outcome": builder.outcome,
            "failed": sorted(r.sample_id for r in records if r.status != "ok"),
            "model_id": engine.model_id,
            "prompt_pool_version": pools["version"],
        })
        write_json(os.path.splitext(output)[0] + ".summary.json", summary)
        config.save(os.path.dirname(os.path.abspath(output)))
        if args.attach and ok:
            save_split(attach_rationales(samples, ok), args.dataset, args.split)

        logger.info(f"{len(ok)}/{len(records)} records, {summary['calls']} calls, "
                    f"{summary['cache_hits']} cache hits, {summary['failures']} failures -> {output}")
        return OUTCOME_CODES[builder.outcome]
