from dataclasses import dataclass, asdict
from typing import Optional, Tuple


@dataclass(frozen=True)
class ObjectAnnotation:
    """A visual object box linked to one target of the sentence (MNER-style annotation)."""
    object_id: str
    bbox: Tuple[float, float, float, float]
    linked_target: str

    @classmethod
    def from_dict(cls, obj):
        bbox = obj["bbox"]
        if len(bbox) != 4:
            raise ValueError(f"bbox must be (x, y, w, h), got {bbox!r}")
        return cls(
            object_id=str(obj["object_id"]),
            bbox=tuple(float(v) for v in bbox),
            linked_target=obj["linked_target"],
        )

    def to_dict(self):
        d = asdict(self)
        d["bbox"] = list(self.bbox)
        return d


@dataclass(frozen=True)
class ImageRegion:
    """Whole image when bbox is None, otherwise the bbox crop of it (no padding)."""
    image_ref: str
    bbox: Optional[Tuple[float, float, float, float]] = None
    object_id: Optional[str] = None

    @property
    def is_crop(self):
        return self.bbox is not None

    def within(self, width, height):
        if self.bbox is None:
            return True
        x, y, w, h = self.bbox
        return x >= 0 and y >= 0 and w > 0 and h > 0 and x + w <= width and y + h <= height

    def key(self):
        return {
            "image": self.image_ref,
            "bbox": list(self.bbox) if self.bbox is not None else None,
            "object_id": self.object_id,
        }

    @classmethod
    def crop(cls, image_ref, annotation):
        return cls(image_ref=image_ref, bbox=annotation.bbox, object_id=annotation.object_id)


AUX_KINDS = ("AC", "FD", "AO")
MAX_AUX_TOKENS = 50


def truncate_tokens(text, limit=MAX_AUX_TOKENS):
    return " ".join(text.split()[:limit])


@dataclass(frozen=True)
class AuxiliaryText:
    """AC comes from the whole image, FD and AO from an object crop."""
    kind: str
    text: str
    source: str
    token_length: int

    @classmethod
    def build(cls, kind, text, source, limit=MAX_AUX_TOKENS):
        if kind not in AUX_KINDS:
            raise ValueError(f"kind must be one of {AUX_KINDS}, got {kind!r}")
        text = truncate_tokens(text, limit)
        return cls(kind=kind, text=text, source=source, token_length=len(text.split()))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, obj):
        return cls(**obj)
