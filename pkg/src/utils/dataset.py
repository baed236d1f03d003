import os
from dataclasses import dataclass, field
from typing import List, Optional

from translation.objects import ObjectAnnotation
from .errors import DatasetError, LabelError
from .io import read_jsonl, write_jsonl

LABELS = ("positive", "neutral", "negative")
SPLITS = ("train", "dev", "test")


def check_label(label):
    if label not in LABELS:
        raise LabelError(f"label must be one of {LABELS}, got {label!r}")
    return label


@dataclass
class Sample:
    """One MASC record: an image-text pair, one target and everything derived for it.

    `objects` holds the candidate annotations linked to this target; `object`
    is the one kept by resolution. `od_kind` is FD or AO when `od` is set.
    """
    id: str
    image: str
    sentence: str
    target: str
    label: str
    objects: List[ObjectAnnotation] = field(default_factory=list)
    object: Optional[ObjectAnnotation] = None
    ac: Optional[str] = None
    ac_generic: Optional[str] = None
    od: Optional[str] = None
    od_kind: Optional[str] = None
    sr: Optional[str] = None
    ir: Optional[str] = None

    @classmethod
    def from_dict(cls, obj):
        raw_object = obj.get("object")
        candidates = obj.get("objects") or []
        # a list under "object" is a candidate set that has not been resolved yet
        if isinstance(raw_object, list):
            candidates, raw_object = raw_object, None
        # a resolved object with no candidate list is its own single candidate
        if raw_object and not candidates:
            candidates = [raw_object]
        objects = [ObjectAnnotation.from_dict(o) for o in candidates]
        for annotation in objects:
            if annotation.linked_target.lower() not in obj["sentence"].lower():
                raise DatasetError(f"sample {obj['id']}: object {annotation.object_id} links "
                                   f"{annotation.linked_target!r}, which is not in the sentence")
        return cls(
            id=str(obj["id"]),
            image=obj["image"],
            sentence=obj["sentence"],
            target=obj["target"],
            label=check_label(obj["label"]),
            objects=objects,
            object=ObjectAnnotation.from_dict(raw_object) if raw_object else None,
            ac=obj.get("ac"),
            ac_generic=obj.get("ac_generic"),
            od=obj.get("od"),
            od_kind=obj.get("od_kind"),
            sr=obj.get("sr"),
            ir=obj.get("ir"),
        )

    def to_dict(self):
        d = {
            "id": self.id,
            "image": self.image,
            "sentence": self.sentence,
            "target": self.target,
            "label": self.label,
        }
        if self.objects:
            d["objects"] = [o.to_dict() for o in self.objects]
        if self.object is not None:
            d["object"] = self.object.to_dict()
        for key in ("ac", "ac_generic", "od", "od_kind", "sr", "ir"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value
        return d

    @property
    def has_object(self):
        return self.object is not None and self.od is not None


def split_path(dataset_dir, split):
    return os.path.join(dataset_dir, f"{split}.jsonl")


def load_split(dataset_dir, split):
    path = split_path(dataset_dir, split)
    if not os.path.exists(path):
        raise FileNotFoundError(f"split '{split}' not found at {path}")
    return [Sample.from_dict(obj) for obj in read_jsonl(path)]


def save_split(samples, dataset_dir, split):
    write_jsonl(split_path(dataset_dir, split), [s.to_dict() for s in samples])


def available_splits(dataset_dir):
    return [s for s in SPLITS if os.path.exists(split_path(dataset_dir, s))]
