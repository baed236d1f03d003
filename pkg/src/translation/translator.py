import concurrent.futures
import dataclasses
import threading

from tqdm import tqdm

from utils.cache import content_key
from utils.errors import ProviderError
from utils.log import get_logger
from .objects import AuxiliaryText
from .router import resolve_object, route_description

logger = get_logger("translation")


class Translator:
    """Fills `object`, `ac`, `ac_generic`, `od` and `od_kind` of samples, caching provider output."""

    def __init__(self, scorer, detector, captioner, face_describer, cache=None, max_workers=4):
        self.scorer = scorer
        self.detector = detector
        self.captioner = captioner
        self.face_describer = face_describer
        self.cache = cache
        self.max_workers = max_workers
        self.summary = {"routed": 0, "cache_hits": 0, "failures": 0}
        self._lock = threading.Lock()

    def _count(self, name):
        with self._lock:
            self.summary[name] += 1

    def _providers(self, resolved):
        if resolved is None:
            return [self.captioner.provider_id]
        return [self.detector.provider_id, self.face_describer.provider_id, self.captioner.provider_id]

    def describe(self, image_ref, resolved, mode):
        object_id = resolved.object_id if resolved is not None else None
        key = content_key(image_ref, object_id, self._providers(resolved), mode)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                self._count("cache_hits")
                return AuxiliaryText.from_dict(hit)
        aux = route_description(image_ref, resolved, self.detector, self.captioner, self.face_describer, mode)
        self._count("routed")
        if self.cache is not None:
            self.cache.put(key, aux.to_dict())
        return aux

    def prepare(self, sample):
        candidates = sample.objects or ([sample.object] if sample.object is not None else [])
        resolved = resolve_object(sample.target, candidates, sample.image, self.scorer)
        updates = {
            "object": resolved,
            "ac": self.describe(sample.image, None, "aesthetic").text,
            "ac_generic": self.describe(sample.image, None, "generic").text,
            "od": None,
            "od_kind": None,
        }
        if resolved is not None:
            od = self.describe(sample.image, resolved, "aesthetic")
            updates["od"], updates["od_kind"] = od.text, od.kind
        return dataclasses.replace(sample, **updates)

    def prepare_all(self, samples):
        """Returns (prepared samples in input order, ids that failed)."""
        prepared = {}
        failed = []
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {executor.submit(self.prepare, s): s for s in samples}
            for future in tqdm(concurrent.futures.as_completed(futures), total=len(futures), desc="prepare-aux"):
                sample = futures[future]
                try:
                    prepared[sample.id] = future.result()
                except ProviderError as e:
                    logger.error(f"sample {sample.id}: {e}")
                    failed.append(sample.id)
                    self._count("failures")
        return [prepared.get(s.id, s) for s in samples], sorted(failed)
