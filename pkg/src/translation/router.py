import numpy as np

from utils.errors import ProviderError
from utils.log import get_logger
from .objects import AuxiliaryText, ImageRegion

logger = get_logger("translation")


class CosineRegionScorer:
    """Cosine between the whole-image embedding and a candidate crop's embedding."""

    def __init__(self, features):
        self.features = features

    def __call__(self, image_ref, annotation):
        whole = np.asarray(self.features.region_embedding(image_ref), dtype=np.float64)
        crop = np.asarray(self.features.region_embedding(image_ref, annotation.bbox), dtype=np.float64)
        denom = np.linalg.norm(whole) * np.linalg.norm(crop)
        return 0.0 if denom == 0 else float(whole @ crop / denom)


def resolve_object(target, candidates, image_ref, scorer):
    """Highest-scoring candidate linked to `target`; ties go to the lowest object_id."""
    linked = [c for c in candidates if c.linked_target == target]
    if not linked:
        return None
    if len(linked) == 1:
        return linked[0]
    scored = [(scorer(image_ref, c), c) for c in linked]
    best = max(score for score, _ in scored)
    winners = [c for score, c in scored if score == best]
    return min(winners, key=lambda c: _id_order(c.object_id))


def _id_order(object_id):
    # numeric ids compare as numbers, everything else as text
    return (0, int(object_id), "") if str(object_id).isdigit() else (1, 0, str(object_id))


def _call(provider, fn, *args):
    try:
        return fn(*args)
    except ProviderError:
        raise
    except Exception as e:
        raise ProviderError(provider.provider_id, f"{type(e).__name__}: {e}") from e


def route_description(image_ref, resolved, detector, captioner, face_describer, mode="aesthetic"):
    """One AuxiliaryText: AC for the whole image, FD for a face crop, AO for any other crop."""
    if resolved is None:
        region = ImageRegion(image_ref)
        text = _call(captioner, captioner.describe, region, mode)
        return AuxiliaryText.build("AC", text, captioner.provider_id)

    region = ImageRegion.crop(image_ref, resolved)
    faces = _call(detector, detector.detect, region)
    if faces >= 1:
        text = _call(face_describer, face_describer.describe, region, mode)
        return AuxiliaryText.build("FD", text, face_describer.provider_id)
    text = _call(captioner, captioner.describe, region, mode)
    return AuxiliaryText.build("AO", text, captioner.provider_id)
