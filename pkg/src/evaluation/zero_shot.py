from concurrent.futures import ThreadPoolExecutor, as_completed

from tqdm import tqdm

from learning.sequences import UNDISCERNED, ParsedOutput, parse_output
from utils.errors import ClientError
from utils.log import get_logger

logger = get_logger("evaluation")

INSTRUCTION = (
    "You are given a text and an aspect term mentioned in it. Decide the sentiment expressed "
    "towards the aspect, taking the attached image into account when there is one. "
    "Answer with exactly one of: <sen> positive </sen>, <sen> neutral </sen>, <sen> negative </sen>."
)


def zero_shot_messages(sample):
    return [
        {"role": "system", "content": INSTRUCTION},
        {"role": "user", "content": f"Text: {sample.sentence}\nAspect: {sample.target}"},
    ]


def zero_shot_predictions(samples, engine, image_loader=None, max_workers=4):
    """SC predictions straight from an LLM; a failed call counts as undiscerned."""
    outputs = [None] * len(samples)

    def predict(i):
        sample = samples[i]
        image = image_loader(sample.image) if image_loader else None
        try:
            return i, parse_output("SC", engine.get_response(zero_shot_messages(sample), image=image))
        except ClientError as e:
            logger.warning(f"[{sample.id}] zero-shot call failed: {e}")
            return i, ParsedOutput(sentiment=UNDISCERNED)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(predict, i) for i in range(len(samples))]
        for future in tqdm(as_completed(futures), total=len(futures), desc="zero-shot"):
            i, parsed = future.result()
            outputs[i] = parsed
    return outputs
