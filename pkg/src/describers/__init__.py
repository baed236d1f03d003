from .base import CAPTION_MODES, Describer, FaceDetector
from .mock import MockCaptioner, MockFaceDescriber, MockFaceDetector

try:
    from .blip import BLIPCaptioner
except ImportError:
    pass
