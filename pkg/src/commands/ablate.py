import itertools
import os

from prettytable import PrettyTable

from utils.config import ABLATIONS
from utils.errors import ConfigError, TrainingError
from utils.io import write_json
from utils.log import get_logger
from utils.register import register_class
from .base import EXIT_COMPLETE, EXIT_FAILED, EXIT_PARTIAL, Command
from .common import add_run_args, run_config
from .train import train_and_evaluate

logger = get_logger("commands")

GRID_KEYS = {"alpha": "alpha", "lambda": "lam", "lam": "lam"}


def parse_grid(items):
    """["alpha=0.1,0.2", "lambda=0.5"] -> {"alpha": [0.1, 0.2], "lam": [0.5]}."""
    grid = {}
    for item in items or []:
        key, sep, values = item.partition("=")
        if not sep or key not in GRID_KEYS:
            raise ConfigError(f"--grid entries look like alpha=0.1,0.2 or lambda=0.2,0.5; got {item!r}")
        try:
            grid[GRID_KEYS[key]] = [float(v) for v in values.split(",") if v]
        except ValueError as e:
            raise ConfigError(f"--grid {key}: {e}") from e
    return grid


def grid_rows(grid):
    if not grid:
        return []
    keys = sorted(grid)
    rows = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        name = "_".join(f"{'lambda' if k == 'lam' else k}{v:g}" for k, v in overrides.items())
        rows.append((name, overrides))
    return rows


def _pct(metrics, head, key):
    if not metrics or head not in metrics:
        return "-"
    return f"{100 * metrics[head][key]:.2f}"


def render_ablation_table(results):
    table = PrettyTable(["Row", "Terms", "SC Acc", "SC F1", "SRG Acc", "SRG F1", "IRG Acc", "IRG F1"])
    table.align["Row"] = "l"
    for name, result in results.items():
        metrics = result.get("metrics")
        table.add_row([name, result.get("terms", "-"),
                       _pct(metrics, "SC", "acc"), _pct(metrics, "SC", "f1"),
                       _pct(metrics, "SRG", "acc"), _pct(metrics, "SRG", "f1"),
                       _pct(metrics, "IRG", "acc"), _pct(metrics, "IRG", "f1")])
    return table


@register_class(alias="Command.Ablate")
class Ablate(Command):
    """Train and test one run per ablation row and grid point, each in its own directory."""

    @staticmethod
    def add_parser_args(parser):
        add_run_args(parser)
        parser.add_argument("--output_dir", type=str, default="outputs/ablate")
        parser.add_argument("--rows", type=str, default=",".join(ABLATIONS),
                            help=f"comma-separated ablation rows from {', '.join(ABLATIONS)}; empty for none")
        parser.add_argument("--grid", type=str, nargs="*", default=None,
                            help="alpha=0.1,0.2 lambda=0.2,0.5 runs the full model on every combination")

    def run(self):
        args = self.args
        base = run_config(args)
        names = [r.strip() for r in args.rows.split(",") if r.strip()]
        unknown = [r for r in names if r not in ABLATIONS]
        if unknown:
            raise ConfigError(f"unknown ablation rows {unknown}; expected some of {list(ABLATIONS)}")
        plan = [(name, ABLATIONS[name]) for name in names] + grid_rows(parse_grid(args.grid))
        if not plan:
            raise ConfigError("nothing to run: give --rows or --grid")
        configs = []
        for name, overrides in plan:
            config = base.with_overrides(output_dir=os.path.join(base.output_dir, name), **overrides)
            configs.append((name, config.validate(require_dataset=True)))

        results = {}
        for name, config in configs:
            logger.info(f"=== {name}: {', '.join(config.enabled_terms())} ===")
            try:
                _, metrics = train_and_evaluate(args, config)
                results[name] = {"terms": "+".join(config.enabled_terms()), "metrics": metrics,
                                 "output_dir": config.output_dir}
            except TrainingError as e:
                logger.error(f"{name} failed: {e}")
                results[name] = {"terms": "+".join(config.enabled_terms()), "error": str(e),
                                 "output_dir": config.output_dir}

        write_json(os.path.join(base.output_dir, "ablation.json"), results)
        print(render_ablation_table(results))
        failed = sum("error" in r for r in results.values())
        if failed == 0:
            return EXIT_COMPLETE
        return EXIT_FAILED if failed == len(results) else EXIT_PARTIAL
