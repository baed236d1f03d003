import hashlib
import os
import random
import re
from dataclasses import dataclass

from utils.dataset import check_label
from utils.errors import PromptPoolError
from utils.io import read_json

KINDS = ("SR", "IR")
PLACEHOLDERS = ("aspect", "label")
SR_STEM = "Based on the image-text pair, the sentiment towards {aspect} is {label} because"
PLACEHOLDER_PATTERN = re.compile(r"\{([^{}]*)\}")
DEFAULT_POOL_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "prompt_pools.json")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    kind: str
    system_text: str
    user_text: str


def validate_template(template):
    found = PLACEHOLDER_PATTERN.findall(template.user_text) + PLACEHOLDER_PATTERN.findall(template.system_text)
    unknown = sorted(set(found) - set(PLACEHOLDERS))
    if unknown:
        raise PromptPoolError(f"template {template.id}: unknown placeholders {unknown}")
    for name in PLACEHOLDERS:
        if "{" + name + "}" not in template.user_text:
            raise PromptPoolError(f"template {template.id}: user_text lacks {{{name}}}")
    if template.kind == "SR" and SR_STEM not in template.user_text:
        raise PromptPoolError(f"template {template.id}: SR templates must demand the response stem")
    return template


def load_pools(path=DEFAULT_POOL_PATH):
    """{"SR": [...], "IR": [...]} of validated templates, plus the file version under "version"."""
    raw = read_json(path)
    pools = {"version": raw.get("version", 0)}
    seen = set()
    for kind in KINDS:
        pools[kind] = []
        for entry in raw.get(kind, []):
            template = validate_template(PromptTemplate(
                id=entry["id"], kind=kind, system_text=entry["system_text"], user_text=entry["user_text"]))
            if template.id in seen:
                raise PromptPoolError(f"duplicate template id {template.id}")
            seen.add(template.id)
            pools[kind].append(template)
    return pools


def select_prompt(pool, kind, rng_seed):
    candidates = [t for t in pool if t.kind == kind]
    if not candidates:
        raise PromptPoolError(f"no {kind} templates in the pool")
    return random.Random(rng_seed).choice(candidates)


def sample_seed(seed, sample_id, kind):
    digest = hashlib.sha1(f"{seed}|{sample_id}|{kind}".encode("utf-8")).hexdigest()
    return int(digest[:16], 16)


def render_prompt(template, aspect, label):
    """Single-pass substitution, so placeholder-looking text inside `aspect` stays literal."""
    check_label(label)
    values = {"aspect": aspect, "label": label}

    def substitute(text):
        return PLACEHOLDER_PATTERN.sub(lambda m: values[m.group(1)], text)

    return substitute(template.system_text), substitute(template.user_text)


def response_stem(aspect, label):
    return SR_STEM.format(aspect=aspect, label=label)
