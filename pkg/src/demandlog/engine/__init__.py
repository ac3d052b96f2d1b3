"""Bottom-up evaluation engine."""
from .evaluate import (
    EbuAudit, EvalResult, FiringCounter, answer_query, bu_evaluate, ebu_evaluate, gc_paused,
)
from .kernel import KERNELS
from .store import FactStore

__all__ = [
    "EbuAudit", "EvalResult", "FactStore", "FiringCounter", "KERNELS",
    "answer_query", "bu_evaluate", "ebu_evaluate", "gc_paused",
]
