from .prompts import (
    KINDS,
    SR_STEM,
    PromptTemplate,
    load_pools,
    render_prompt,
    response_stem,
    sample_seed,
    select_prompt,
    validate_template,
)
from .generator import RationaleBuilder, RationaleRecord, attach_rationales, generate_rationales
