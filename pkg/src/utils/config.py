import dataclasses
import os
from dataclasses import dataclass, field
from typing import Dict, Union

from .errors import ConfigError
from .io import read_json, write_json

CONFIG_FILENAME = "run_config.json"

# Grid-searched settings per dataset; epochs/batch/optimizer are shared.
PRESETS = {
    "twitter2015": {"lr": 3e-4, "alpha": 0.2, "lam": 0.2},
    "twitter2017": {"lr": 3e-4, "alpha": 0.1, "lam": 0.5},
    "political": {"lr": 1e-4, "alpha": 0.2, "lam": 0.5},
}

# Ablation rows; each is a set of switch overrides on top of the full model.
ABLATIONS = {
    "full": {},
    "wo_srg": {"enable_srg": False},
    "wo_irg": {"enable_irg": False},
    "wo_irg_ac": {"enable_irg": False, "aesthetic_vs_generic_caption": "generic"},
    "wo_srg_irg": {"enable_srg": False, "enable_irg": False},
    "wo_lsa": {"enable_lsa": False},
    "wo_od": {"enable_od": False},
    "wo_aes_cap": {"enable_aes_cap": False},
}

# --ablate tokens accepted by the train command.
SWITCHES = {
    "srg": "enable_srg",
    "irg": "enable_irg",
    "lsa": "enable_lsa",
    "od": "enable_od",
    "aes_cap": "enable_aes_cap",
}


@dataclass
class RunConfig:
    dataset: str = "data/toy"
    preset: str = "twitter2015"
    output_dir: str = "outputs/run"
    seed: int = 42
    epochs: int = 10
    batch: int = 4
    lr: float = None
    alpha: float = None
    lam: float = None
    beta: float = 0.5
    tau: float = 1.0
    gamma: float = 0.2
    n_f: Union[str, int] = "half"
    gumbel_form: str = "printed"
    k_form: str = "sum"
    enable_srg: bool = True
    enable_irg: bool = True
    enable_lsa: bool = True
    enable_od: bool = True
    enable_aes_cap: bool = True
    aesthetic_vs_generic_caption: str = "aesthetic"
    prepend_visual: bool = False
    f1_average: str = "macro"
    features: str = "Features.Synthetic"
    backbone: str = "Backbone.Tiny"
    engine: str = "Engine.Mock"
    max_grad_norm: float = 1.0
    components: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        preset = PRESETS.get(self.preset, {})
        for key, value in preset.items():
            if getattr(self, key) is None:
                setattr(self, key, value)
        if isinstance(self.n_f, str) and self.n_f.isdigit():
            self.n_f = int(self.n_f)

    @classmethod
    def field_names(cls):
        return [f.name for f in dataclasses.fields(cls) if f.name != "components"]

    @classmethod
    def from_args(cls, args):
        values = vars(args) if not isinstance(args, dict) else dict(args)
        names = set(cls.field_names())
        core = {k: v for k, v in values.items() if k in names and v is not None}
        extra = {
            k: v for k, v in values.items()
            if k not in names and k not in ("command", "config") and _jsonable(v)
        }
        return cls(components=extra, **core)

    def validate(self, require_dataset=False):
        problems = []
        if self.preset not in PRESETS:
            problems.append(f"preset must be one of {sorted(PRESETS)}, got {self.preset!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            problems.append(f"seed must be a non-negative int, got {self.seed!r}")
        if self.epochs < 1:
            problems.append(f"epochs must be >= 1, got {self.epochs}")
        if self.batch < 1:
            problems.append(f"batch must be >= 1, got {self.batch}")
        if self.lr is None or self.lr <= 0:
            problems.append(f"lr must be > 0, got {self.lr}")
        if self.alpha is None or not 0 < self.alpha < 1:
            problems.append(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.lam is None or not 0 < self.lam < 1:
            problems.append(f"lambda must lie in (0, 1), got {self.lam}")
        if not 0 <= self.beta <= 1:
            problems.append(f"beta must lie in [0, 1], got {self.beta}")
        if self.tau <= 0:
            problems.append(f"tau must be > 0, got {self.tau}")
        if self.gamma <= 0:
            problems.append(f"gamma must be > 0, got {self.gamma}")
        if not (self.n_f == "half" or (isinstance(self.n_f, int) and self.n_f >= 1)):
            problems.append(f"n_f must be 'half' or a positive int, got {self.n_f!r}")
        if self.gumbel_form not in ("printed", "canonical"):
            problems.append(f"gumbel_form must be printed|canonical, got {self.gumbel_form!r}")
        if self.k_form not in ("sum", "half"):
            problems.append(f"k_form must be sum|half, got {self.k_form!r}")
        if self.aesthetic_vs_generic_caption not in ("aesthetic", "generic"):
            problems.append(
                f"aesthetic_vs_generic_caption must be aesthetic|generic, got {self.aesthetic_vs_generic_caption!r}")
        if self.f1_average not in ("macro", "micro"):
            problems.append(f"f1_average must be macro|micro, got {self.f1_average!r}")
        if require_dataset and not os.path.isdir(self.dataset):
            problems.append(f"dataset directory not found: {self.dataset}")
        if problems:
            raise ConfigError(problems)
        return self

    def with_overrides(self, **overrides):
        return dataclasses.replace(self, **overrides)

    def ablated(self, tokens):
        overrides = {}
        for token in tokens:
            if token not in SWITCHES:
                raise ConfigError(f"unknown ablation {token!r}; expected one of {sorted(SWITCHES)}")
            overrides[SWITCHES[token]] = False
        return self.with_overrides(**overrides)

    def enabled_terms(self):
        terms = ["sc"]
        if self.enable_srg:
            terms.append("srg")
        if self.enable_irg:
            terms.append("irg")
        if self.enable_lsa:
            terms.append("align")
        return terms

    def to_dict(self):
        return dataclasses.asdict(self)

    def save(self, directory):
        write_json(os.path.join(directory, CONFIG_FILENAME), self.to_dict())

    @classmethod
    def load(cls, path):
        if os.path.isdir(path):
            path = os.path.join(path, CONFIG_FILENAME)
        return cls(**read_json(path))


def _jsonable(value):
    return isinstance(value, (str, int, float, bool, list, dict)) or value is None
