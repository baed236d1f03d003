import argparse

from utils.errors import ConfigError
from utils.io import read_json
from utils.register import registry

VERBS = {
    "build-rationales": "Command.BuildRationales",
    "prepare-aux": "Command.PrepareAux",
    "train": "Command.Train",
    "evaluate": "Command.Evaluate",
    "ablate": "Command.Ablate",
    "stats": "Command.Stats",
    "inspect": "Command.Inspect",
}

# Arguments naming a registered class; each selected class contributes its own flags.
COMPONENT_ARGS = {
    "engine": "Engine",
    "features": "Features",
    "backbone": "Backbone",
    "captioner": "Captioner",
    "face_describer": "Face describer",
    "face_detector": "Face detector",
    "scorer": "Intensity scorer",
}


def str2bool(value):
    if isinstance(value, bool):
        return value
    if value.lower() in ("true", "1", "yes", "y"):
        return True
    if value.lower() in ("false", "0", "no", "n"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


def get_parser(argv=None):
    """Parse `run.py <verb> ...` in phases: verb, then its flags, then the flags of selected components.

    Values from `--config` act as defaults, so explicit flags still win.
    """
    parser = argparse.ArgumentParser(prog="run.py", conflict_handler="resolve")
    parser.add_argument("command", choices=sorted(VERBS))
    parser.add_argument("--config", type=str, default=None, help="JSON file of flag defaults")
    parser.add_argument("--log_level", type=str, default="INFO")
    args, _ = parser.parse_known_args(argv)

    file_defaults = read_json(args.config) if args.config else {}
    if "lambda" in file_defaults:
        file_defaults["lam"] = file_defaults.pop("lambda")

    command_group = parser.add_argument_group(title="Command", description=f"{args.command} configuration")
    registry.get_class(VERBS[args.command]).add_parser_args(command_group)
    parser.set_defaults(**file_defaults)
    args, _ = parser.parse_known_args(argv)

    for attr, title in COMPONENT_ARGS.items():
        alias = getattr(args, attr, None)
        if alias is None:
            continue
        component = registry.get_class(alias)
        if component is None:
            known = registry.aliases(alias.split(".")[0] + ".")
            raise ConfigError(f"--{attr}: unknown component {alias!r}; registered: {', '.join(known)}")
        group = parser.add_argument_group(title=title, description=f"{alias} configuration")
        component.add_parser_args(group)

    parser.set_defaults(**file_defaults)
    return parser.parse_args(argv)
