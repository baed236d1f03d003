import re

from .sequences import MARKERS

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
SPECIALS = [PAD, BOS, EOS, UNK] + list(MARKERS)

_TOKEN_PATTERN = re.compile(
    "|".join(re.escape(m) for m in sorted(MARKERS, key=len, reverse=True))
    + r"|&lt;|&amp;|\w+|[^\w\s]"
)


def split_tokens(text):
    return _TOKEN_PATTERN.findall(text.lower())


class WordTokenizer:
    """Whitespace/punctuation tokenizer with markers as reserved single ids."""

    def __init__(self, vocab=None):
        self.itos = list(vocab) if vocab is not None else list(SPECIALS)
        self.stoi = {tok: i for i, tok in enumerate(self.itos)}

    @classmethod
    def build(cls, texts, min_count=1):
        counts = {}
        for text in texts:
            for tok in split_tokens(text):
                if tok not in SPECIALS:
                    counts[tok] = counts.get(tok, 0) + 1
        words = sorted(w for w, c in counts.items() if c >= min_count)
        return cls(SPECIALS + words)

    @property
    def pad_id(self):
        return self.stoi[PAD]

    @property
    def bos_id(self):
        return self.stoi[BOS]

    @property
    def eos_id(self):
        return self.stoi[EOS]

    def __len__(self):
        return len(self.itos)

    def encode(self, text, add_eos=True):
        unk = self.stoi[UNK]
        ids = [self.stoi.get(tok, unk) for tok in split_tokens(text)]
        return ids + [self.eos_id] if add_eos else ids

    def decode(self, ids):
        words = []
        for i in ids:
            i = int(i)
            if i == self.eos_id:
                break
            if i in (self.pad_id, self.bos_id):
                continue
            words.append(self.itos[i] if 0 <= i < len(self.itos) else UNK)
        return " ".join(words)

    def state_dict(self):
        return {"vocab": self.itos}

    @classmethod
    def from_state_dict(cls, state):
        return cls(state["vocab"])
