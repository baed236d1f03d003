from .objects import AUX_KINDS, AuxiliaryText, ImageRegion, ObjectAnnotation, truncate_tokens
from .router import CosineRegionScorer, resolve_object, route_description
from .translator import Translator
