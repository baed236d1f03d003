import hashlib
import re

from utils.register import register_class

WORD_PATTERN = re.compile(r"\w+|[^\w\s]")


def stable_seed(*parts):
    digest = hashlib.sha1("\x1f".join(str(p) for p in parts).encode("utf-8")).hexdigest()
    return int(digest[:8], 16)


def split_words(sentence):
    return WORD_PATTERN.findall(sentence.lower())


@register_class(alias="Features.Base")
class FeatureProvider:
    """(image_ref) -> PatchFeatures, (sentence) -> TokenFeatures, both of width `dim`."""
    dim = 0
    num_patches = 0

    @staticmethod
    def add_parser_args(parser):
        pass

    def image_features(self, image_ref):
        raise NotImplementedError

    def text_features(self, sentence):
        raise NotImplementedError

    def region_embedding(self, image_ref, bbox=None):
        """Embedding of the whole image (bbox None) or of a crop."""
        raise NotImplementedError
