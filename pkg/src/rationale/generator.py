import concurrent.futures
import threading
from dataclasses import asdict, dataclass
from typing import Optional

from tqdm import tqdm

from utils.cache import content_key
from utils.errors import ClientError
from utils.log import get_logger
from .prompts import render_prompt, response_stem, sample_seed, select_prompt

logger = get_logger("rationale")


@dataclass
class RationaleRecord:
    sample_id: str
    sr_text: str
    ir_text: str
    sr_prompt_id: str
    ir_prompt_id: str
    model_id: str
    cache_key: str
    status: str = "ok"
    error: Optional[str] = None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, obj):
        return cls(**obj)


class BudgetExhausted(Exception):
    pass


class RationaleBuilder:
    """Builds one SR/IR record per sample through an engine, with a per-(sample, prompt, model) cache."""

    def __init__(self, pools, client, cache, seed=0, max_workers=4, budget=None, image_loader=None):
        self.pools = pools
        self.client = client
        self.cache = cache
        self.seed = seed
        self.max_workers = max_workers
        self.budget = budget
        self.image_loader = image_loader
        self.summary = {"samples": 0, "calls": 0, "cache_hits": 0, "failures": 0, "stem_warnings": 0}
        self._lock = threading.Lock()

    def _count(self, name):
        with self._lock:
            self.summary[name] += 1

    def _reserve_call(self):
        with self._lock:
            if self.budget is not None and self.summary["calls"] >= self.budget:
                raise BudgetExhausted(f"call budget of {self.budget} exhausted")
            self.summary["calls"] += 1

    def _generate(self, sample, template):
        model_id = self.client.model_id
        key = content_key(sample.id, template.id, model_id)
        hit = self.cache.get(key)
        if hit is not None:
            self._count("cache_hits")
            return hit["text"]

        system_text, user_text = render_prompt(template, sample.target, sample.label)
        messages = [
            {"role": "system", "content": system_text},
            {"role": "user", "content": f"{user_text}\n\nText: {sample.sentence}"},
        ]
        image = self.image_loader(sample.image) if self.image_loader is not None else None
        self._reserve_call()
        text = self.client.get_response(messages, image=image).strip()
        if not text:
            raise ClientError(model_id, "empty response", attempts=1)
        if template.kind == "SR" and not text.startswith(response_stem(sample.target, sample.label)):
            self._count("stem_warnings")
            logger.warning(f"sample {sample.id}: SR response does not start with the demanded stem")
        self.cache.put(key, {
            "sample_id": sample.id,
            "kind": template.kind,
            "prompt_id": template.id,
            "model_id": model_id,
            "text": text,
        })
        return text

    def build_one(self, sample):
        sr_template = select_prompt(self.pools["SR"], "SR", sample_seed(self.seed, sample.id, "SR"))
        ir_template = select_prompt(self.pools["IR"], "IR", sample_seed(self.seed, sample.id, "IR"))
        record = RationaleRecord(
            sample_id=sample.id,
            sr_text="",
            ir_text="",
            sr_prompt_id=sr_template.id,
            ir_prompt_id=ir_template.id,
            model_id=self.client.model_id,
            cache_key=content_key(sample.id, f"{sr_template.id}|{ir_template.id}", self.client.model_id),
        )
        try:
            record.sr_text = self._generate(sample, sr_template)
            record.ir_text = self._generate(sample, ir_template)
        except (ClientError, BudgetExhausted) as e:
            record.status, record.error = "failed", str(e)
            self._count("failures")
            logger.error(f"sample {sample.id}: {e}")
        return record

    def run(self, dataset):
        self.summary["samples"] = len(dataset)
        records = []
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = [executor.submit(self.build_one, sample) for sample in dataset]
            for future in tqdm(concurrent.futures.as_completed(futures), total=len(futures), desc="rationales"):
                records.append(future.result())
        return sorted(records, key=lambda r: r.sample_id)

    @property
    def outcome(self):
        if self.summary["failures"] == 0:
            return "complete"
        if self.summary["failures"] >= self.summary["samples"]:
            return "failed"
        return "partial"


def generate_rationales(dataset, pools, client, cache, seed=0, max_workers=4, budget=None):
    return RationaleBuilder(pools, client, cache, seed=seed, max_workers=max_workers, budget=budget).run(dataset)


def attach_rationales(samples, records):
    """Copy successful SR/IR texts onto samples, joined on sample id."""
    by_id = {r.sample_id: r for r in records if r.status == "ok"}
    for sample in samples:
        record = by_id.get(sample.id)
        if record is not None:
            sample.sr, sample.ir = record.sr_text, record.ir_text
    return samples
