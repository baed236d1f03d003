from utils.register import register_class

CAPTION_MODES = ("aesthetic", "generic")


@register_class(alias="Describer.Base")
class Describer:
    """Text provider over an ImageRegion (whole image or object crop).

    Request is {region, mode}, response is plain text. Failures surface as
    ProviderError carrying `provider_id`.
    """
    provider_id = "base"

    @staticmethod
    def add_parser_args(parser):
        pass

    def describe(self, region, mode="aesthetic"):
        raise NotImplementedError


@register_class(alias="Detector.Base")
class FaceDetector:
    """Number of faces found in a region; callers treat any count >= 1 as a face."""
    provider_id = "base"

    @staticmethod
    def add_parser_args(parser):
        pass

    def detect(self, region):
        raise NotImplementedError
