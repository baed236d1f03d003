import os

from utils.errors import ProviderError
from utils.register import register_class
from .base import Describer

AESTHETIC_PROMPT = "the aesthetic impression of this picture is"


def open_region(image_dir, region, provider_id):
    """RGB image of the region; a box that leaves the picture is a non-retriable failure."""
    from PIL import Image

    path = os.path.join(image_dir, region.image_ref)
    try:
        image = Image.open(path).convert("RGB")
    except OSError as e:
        raise ProviderError(provider_id, f"cannot open {path}: {e}", retriable=False) from e
    if not region.within(image.width, image.height):
        raise ProviderError(provider_id, f"bbox {region.bbox} outside {image.width}x{image.height} image {path}",
                            retriable=False)
    if region.bbox is not None:
        x, y, w, h = region.bbox
        image = image.crop((x, y, x + w, y + h))
    return image


@register_class(alias="Describer.Caption.BLIP")
class BLIPCaptioner(Describer):
    """Pretrained BLIP captioner. Aesthetic mode conditions the decoder on a fixed prefix."""

    def __init__(self, model_name_or_path="Salesforce/blip-image-captioning-base", image_dir=".",
                 max_new_tokens=50, device="cpu"):
        from transformers import BlipForConditionalGeneration, BlipProcessor

        self.provider_id = f"blip:{model_name_or_path}"
        self.image_dir = image_dir
        self.max_new_tokens = max_new_tokens
        self.device = device
        self.processor = BlipProcessor.from_pretrained(model_name_or_path)
        self.model = BlipForConditionalGeneration.from_pretrained(model_name_or_path).to(device)
        self.model.eval()

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--blip_model_name_or_path", type=str, default="Salesforce/blip-image-captioning-base")
        parser.add_argument("--image_dir", type=str, default=".", help="root that image refs are relative to")

    @classmethod
    def from_args(cls, args):
        return cls(model_name_or_path=args.blip_model_name_or_path, image_dir=args.image_dir)

    def _load(self, region):
        return open_region(self.image_dir, region, self.provider_id)

    def describe(self, region, mode="aesthetic"):
        import torch

        image = self._load(region)
        if mode == "aesthetic":
            inputs = self.processor(image, AESTHETIC_PROMPT, return_tensors="pt").to(self.device)
        else:
            inputs = self.processor(image, return_tensors="pt").to(self.device)
        try:
            with torch.no_grad():
                out = self.model.generate(**inputs, max_new_tokens=self.max_new_tokens)
        except RuntimeError as e:
            raise ProviderError(self.provider_id, str(e)) from e
        return self.processor.decode(out[0], skip_special_tokens=True)
