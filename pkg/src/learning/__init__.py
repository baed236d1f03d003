from .sequences import (
    MARKERS,
    SEPARATOR,
    TASK_TOKENS,
    TASKS,
    UNDISCERNED,
    ParsedOutput,
    TaskSequence,
    build_input,
    format_target,
    parse_output,
    task_sequences,
)
from .losses import LossWeights, generation_loss, total_loss
from .tokenizer import WordTokenizer
from .backbone import Seq2SeqBackbone, TinySeq2Seq
from .hf_backbone import HFSeq2Seq
