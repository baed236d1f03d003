import re
from dataclasses import dataclass
from typing import Optional

from utils.dataset import LABELS, check_label
from utils.errors import SequenceError

TASKS = ("SC", "SRG", "IRG")
TASK_TOKENS = {"SC": "<sc>", "SRG": "<srg>", "IRG": "<irg>"}
SEN_OPEN, SEN_CLOSE = "<sen>", "</sen>"
RATIONALE_MARKERS = {"SRG": ("<sr>", "</sr>"), "IRG": ("<ir>", "</ir>")}
SEPARATOR = "<sep>"
UNDISCERNED = "undiscerned"

MARKERS = (
    list(TASK_TOKENS.values())
    + [SEN_OPEN, SEN_CLOSE]
    + [m for pair in RATIONALE_MARKERS.values() for m in pair]
    + [SEPARATOR]
)

_SEN_SPAN = re.compile(re.escape(SEN_OPEN) + r"([^<]*)" + re.escape(SEN_CLOSE))
_RATIONALE_SPAN = {
    task: re.compile(re.escape(open_) + r"([^<]*)" + re.escape(close))
    for task, (open_, close) in RATIONALE_MARKERS.items()
}


def escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;")


def unescape(text):
    return text.replace("&lt;", "<").replace("&amp;", "&")


def check_task(task):
    if task not in TASKS:
        raise SequenceError(f"task must be one of {TASKS}, got {task!r}")
    return task


@dataclass(frozen=True)
class TaskSequence:
    task: str
    input_text: str
    target_text: Optional[str] = None


@dataclass(frozen=True)
class ParsedOutput:
    sentiment: str
    rationale: Optional[str] = None

    @property
    def discerned(self):
        return self.sentiment != UNDISCERNED


def build_input(task, sample, enable_od=True, enable_aes_cap=True, caption="aesthetic"):
    """Task token, then (AC, S) or (S, OD), then the target, joined by the separator.

    The object description replaces the caption when the target's object was
    resolved and object descriptions are enabled.
    """
    check_task(task)
    if enable_od and sample.has_object:
        segments = [sample.sentence, sample.od]
    else:
        segments = [sample.sentence]
        if enable_aes_cap:
            ac = sample.ac if caption == "aesthetic" else sample.ac_generic
            if not ac:
                raise SequenceError(f"sample {sample.id}: {caption} caption required but missing")
            segments.insert(0, ac)
    segments.append(sample.target)
    return f" {SEPARATOR} ".join([TASK_TOKENS[task]] + [escape(s) for s in segments])


def format_target(task, label, rationale=None):
    check_task(task)
    check_label(label)
    sentiment = f"{SEN_OPEN} {label} {SEN_CLOSE}"
    if task == "SC":
        if rationale is not None:
            raise SequenceError("SC targets carry no rationale")
        return sentiment
    if rationale is None:
        raise SequenceError(f"{task} targets need a rationale")
    open_, close = RATIONALE_MARKERS[task]
    return f"{open_} {escape(rationale)} {close} {sentiment}"


def _inner(span):
    if span.startswith(" "):
        span = span[1:]
    if span.endswith(" "):
        span = span[:-1]
    return span


def parse_output(task, text):
    """First well-formed marker spans win; anything else parses as undiscerned. Never raises."""
    try:
        if isinstance(text, (bytes, bytearray)):
            text = bytes(text).decode("utf-8", errors="replace")
        elif not isinstance(text, str):
            text = str(text)
        sentiment = UNDISCERNED
        match = _SEN_SPAN.search(text)
        if match is not None and match.group(1).strip() in LABELS:
            sentiment = match.group(1).strip()
        rationale = None
        if task in _RATIONALE_SPAN:
            match = _RATIONALE_SPAN[task].search(text)
            if match is not None:
                rationale = unescape(_inner(match.group(1)))
        return ParsedOutput(sentiment=sentiment, rationale=rationale)
    except Exception:
        return ParsedOutput(sentiment=UNDISCERNED)


def task_sequences(sample, config, with_targets=True):
    """Sequences for every enabled task of one sample."""
    tasks = ["SC"]
    if config.enable_srg:
        tasks.append("SRG")
    if config.enable_irg:
        tasks.append("IRG")
    sequences = []
    for task in tasks:
        input_text = build_input(task, sample, config.enable_od, config.enable_aes_cap,
                                 config.aesthetic_vs_generic_caption)
        target = None
        if with_targets:
            rationale = {"SC": None, "SRG": sample.sr, "IRG": sample.ir}[task]
            if task != "SC" and not rationale:
                raise SequenceError(f"sample {sample.id}: {task} enabled but no rationale attached")
            target = format_target(task, sample.label, rationale)
        sequences.append(TaskSequence(task=task, input_text=input_text, target_text=target))
    return sequences
