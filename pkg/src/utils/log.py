import logging
import sys

_FORMAT = "[%(levelname)s] %(message)s"
_configured = False


def configure(level="INFO"):
    global _configured
    root = logging.getLogger("masc")
    if not _configured:
        handler = logging.StreamHandler(sys.stdout)
        handler.setFormatter(logging.Formatter(_FORMAT))
        root.addHandler(handler)
        _configured = True
    root.setLevel(level.upper() if isinstance(level, str) else level)
    return root


def get_logger(name):
    configure_default()
    return logging.getLogger(f"masc.{name}")


def configure_default():
    if not _configured:
        configure("INFO")
