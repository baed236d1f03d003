from utils.register import register_class

EXIT_COMPLETE = 0
EXIT_FAILED = 1
EXIT_PARTIAL = 2
EXIT_CONFIG = 3

OUTCOME_CODES = {"complete": EXIT_COMPLETE, "failed": EXIT_FAILED, "partial": EXIT_PARTIAL}


@register_class(alias="Command.Base")
class Command:
    """One CLI verb. `run()` returns the process exit code."""

    def __init__(self, args):
        self.args = args

    @staticmethod
    def add_parser_args(parser):
        pass

    def run(self):
        raise NotImplementedError
