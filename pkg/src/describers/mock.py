import threading

from features.base import stable_seed
from utils.errors import ProviderError
from utils.register import register_class
from .base import Describer, FaceDetector


def _region_suffix(region):
    if region.bbox is None:
        return region.image_ref
    return f"{region.image_ref}@" + ",".join(f"{v:g}" for v in region.bbox)


class _Recording:
    def __init__(self, fail=False):
        self.fail = fail
        self.requests = []
        self._lock = threading.Lock()

    def _record(self, region, mode):
        with self._lock:
            self.requests.append({"region": region.key(), "mode": mode})
        if self.fail:
            raise ProviderError(self.provider_id, f"mock failure for {region.image_ref}")


@register_class(alias="Describer.Caption.Mock")
class MockCaptioner(Describer, _Recording):
    """Whole image -> "caption:IMG"; crop -> "caption:IMG@x,y,w,h". Generic mode prefixes "plain "."""
    provider_id = "mock-captioner"

    def __init__(self, fail=False, texts=None):
        _Recording.__init__(self, fail)
        self.texts = texts or {}

    @classmethod
    def from_args(cls, args):
        return cls()

    def describe(self, region, mode="aesthetic"):
        self._record(region, mode)
        suffix = _region_suffix(region)
        if suffix in self.texts:
            return self.texts[suffix]
        prefix = "caption" if mode == "aesthetic" else "plain caption"
        return f"{prefix}:{suffix}"


@register_class(alias="Describer.Face.Mock")
class MockFaceDescriber(Describer, _Recording):
    provider_id = "mock-face"

    def __init__(self, fail=False):
        _Recording.__init__(self, fail)

    @classmethod
    def from_args(cls, args):
        return cls()

    def describe(self, region, mode="aesthetic"):
        self._record(region, mode)
        return f"face:{_region_suffix(region)}"


@register_class(alias="Detector.Face.Mock")
class MockFaceDetector(FaceDetector, _Recording):
    """Face counts come from `faces` (object_id -> count); other crops use a hash parity bit."""
    provider_id = "mock-detector"

    def __init__(self, faces=None, fail=False):
        _Recording.__init__(self, fail)
        self.faces = faces

    @classmethod
    def from_args(cls, args):
        return cls()

    def detect(self, region):
        self._record(region, None)
        if self.faces is not None:
            return int(self.faces.get(region.object_id, 0))
        return stable_seed(region.image_ref, region.object_id) % 2
