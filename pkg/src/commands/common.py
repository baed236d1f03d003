import base64
import mimetypes
import os

import torch

from utils.config import PRESETS, RunConfig
from utils.dataset import available_splits, load_split
from utils.errors import ConfigError
from utils.options import str2bool
from utils.register import registry


def add_dataset_args(parser):
    parser.add_argument("--dataset", type=str, default="data/toy", help="directory holding <split>.jsonl files")
    parser.add_argument("--seed", type=int, default=42)


def add_run_args(parser):
    """Flags mirroring RunConfig; lr/alpha/lambda default to the dataset preset."""
    add_dataset_args(parser)
    parser.add_argument("--preset", type=str, default="twitter2015", choices=sorted(PRESETS))
    parser.add_argument("--output_dir", type=str, default="outputs/run")
    parser.add_argument("--epochs", type=int, default=10)
    parser.add_argument("--batch", type=int, default=4)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--alpha", type=float, default=None, help="weight of the SC loss")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="weight of the alignment loss")
    parser.add_argument("--beta", type=float, default=0.5, help="weight of the attentive patch scores")
    parser.add_argument("--tau", type=float, default=1.0, help="Gumbel-Softmax temperature")
    parser.add_argument("--gamma", type=float, default=0.2, help="triplet margin")
    parser.add_argument("--n_f", type=str, default="half", help="aggregated patch count: 'half' or an int")
    parser.add_argument("--gumbel_form", type=str, default="printed", choices=["printed", "canonical"])
    parser.add_argument("--k_form", type=str, default="sum", choices=["sum", "half"])
    for switch in ("enable_srg", "enable_irg", "enable_lsa", "enable_od", "enable_aes_cap"):
        parser.add_argument(f"--{switch}", type=str2bool, default=True)
    parser.add_argument("--aesthetic_vs_generic_caption", type=str, default="aesthetic", choices=["aesthetic", "generic"])
    parser.add_argument("--prepend_visual", type=str2bool, default=False,
                        help="prepend projected calibrated patches to the encoder input")
    parser.add_argument("--f1_average", type=str, default="macro", choices=["macro", "micro"])
    parser.add_argument("--max_grad_norm", type=float, default=1.0)
    parser.add_argument("--features", type=str, default="Features.Synthetic")
    parser.add_argument("--backbone", type=str, default="Backbone.Tiny")


def load_samples(dataset, split):
    try:
        return load_split(dataset, split)
    except FileNotFoundError as e:
        raise ConfigError(str(e)) from e


def resolve_splits(dataset, split):
    splits = available_splits(dataset) if split == "all" else [split]
    if not splits:
        raise ConfigError(f"no splits found under {dataset}")
    return splits


def build_component(args, alias, *extra):
    component = registry.get_class(alias)
    if component is None:
        raise ConfigError(f"unknown component {alias!r}")
    return component.from_args(args, *extra)


def seed_everything(seed):
    torch.manual_seed(seed)


def run_config(args, **overrides):
    return RunConfig.from_args(args).with_overrides(**overrides) if overrides else RunConfig.from_args(args)


def image_loader(image_dir):
    """Data URL (MIME type from the file extension) of an image file under `image_dir`."""
    def load(image_ref):
        mime = mimetypes.guess_type(image_ref)[0] or "image/jpeg"
        with open(os.path.join(image_dir, image_ref), "rb") as f:
            payload = base64.b64encode(f.read()).decode("ascii")
        return f"data:{mime};base64,{payload}"
    return load
