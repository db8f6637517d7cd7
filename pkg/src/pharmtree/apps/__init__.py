"""End-user workflows: pharmacophore-conditioned generation, hit expansion,
evolutionary optimization, and embedding-space lookups.
"""

from .generate import GenerationConfig, InferenceSession, generate
from .expand import hit_expand
from .optimize import GaConfig, LineageEvent, Scorer, optimize
from .neighbors import nearest_blocks

__all__ = [
    "GenerationConfig",
    "InferenceSession",
    "generate",
    "hit_expand",
    "GaConfig",
    "LineageEvent",
    "Scorer",
    "optimize",
    "nearest_blocks",
]
