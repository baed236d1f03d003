import sys

from utils.register import registry
import engine
import describers
import features
import learning
import evaluation
import commands
from commands.base import EXIT_CONFIG
from utils.errors import ConfigError, DatasetError, PromptPoolError, SequenceError
from utils.log import configure, get_logger
from utils.options import VERBS, get_parser

logger = get_logger("run")


def main(argv=None):
    try:
        args = get_parser(argv)
        configure(args.log_level)
        command = registry.get_class(VERBS[args.command])(args)
        return command.run()
    except (ConfigError, DatasetError, PromptPoolError, SequenceError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
