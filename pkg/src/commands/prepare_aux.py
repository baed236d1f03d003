import os

from translation import CosineRegionScorer, Translator
from utils.cache import JsonCache
from utils.dataset import save_split
from utils.io import write_json
from utils.log import get_logger
from utils.register import register_class
from .base import EXIT_COMPLETE, EXIT_FAILED, EXIT_PARTIAL, Command
from .common import add_dataset_args, build_component, load_samples, resolve_splits, run_config

logger = get_logger("commands")


@register_class(alias="Command.PrepareAux")
class PrepareAux(Command):
    """Resolve target objects and write AC / FD / AO texts into the split files."""

    @staticmethod
    def add_parser_args(parser):
        add_dataset_args(parser)
        parser.add_argument("--split", type=str, default="all", help="a split name or 'all'")
        parser.add_argument("--features", type=str, default="Features.Synthetic")
        parser.add_argument("--captioner", type=str, default="Describer.Caption.Mock")
        parser.add_argument("--face_describer", type=str, default="Describer.Face.Mock")
        parser.add_argument("--face_detector", type=str, default="Detector.Face.Mock")
        parser.add_argument("--cache_dir", type=str, default=None, help="defaults to <dataset>/cache/aux")
        parser.add_argument("--max_workers", type=int, default=4)

    def run(self):
        args = self.args
        config = run_config(args).validate(require_dataset=True)
        translator = Translator(
            scorer=CosineRegionScorer(build_component(args, args.features)),
            detector=build_component(args, args.face_detector),
            captioner=build_component(args, args.captioner),
            face_describer=build_component(args, args.face_describer),
            cache=JsonCache(args.cache_dir or os.path.join(args.dataset, "cache", "aux")),
            max_workers=args.max_workers,
        )
        total, failed = 0, []
        for split in resolve_splits(args.dataset, args.split):
            samples = load_samples(args.dataset, split)
            prepared, split_failed = translator.prepare_all(samples)
            save_split(prepared, args.dataset, split)
            total += len(samples)
            failed += split_failed
            kinds = [s.od_kind for s in prepared if s.od_kind]
            logger.info(f"{split}: {len(samples)} samples, {kinds.count('FD')} FD, {kinds.count('AO')} AO, "
                        f"{len(split_failed)} failed")
        write_json(os.path.join(args.dataset, "cache", "aux.summary.json"),
                   dict(translator.summary, failed=sorted(failed)))
        config.save(args.dataset)
        if not failed:
            return EXIT_COMPLETE
        return EXIT_FAILED if len(failed) >= total else EXIT_PARTIAL
