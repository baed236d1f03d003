from .base import EXIT_COMPLETE, EXIT_CONFIG, EXIT_FAILED, EXIT_PARTIAL, OUTCOME_CODES, Command
from .build_rationales import BuildRationales
from .prepare_aux import PrepareAux
from .train import Train, train_and_evaluate
from .evaluate import Evaluate
from .ablate import Ablate
from .stats import Stats
from .inspect_sample import Inspect
