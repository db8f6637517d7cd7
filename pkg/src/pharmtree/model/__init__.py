"""Neural model: equivariant pharmacophore encoder, autoregressive decoder
over fingerprint tokens, block retrieval index, and checkpoint I/O.
"""

from .egnn import EgnnConfig, PharmacophoreEncoder
from .decoder import (
    DecoderConfig,
    ModelConfig,
    RetrievalIndex,
    StepPrediction,
    SynthModel,
    catalog_fingerprint_matrix,
)
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint

__all__ = [
    "EgnnConfig",
    "PharmacophoreEncoder",
    "DecoderConfig",
    "ModelConfig",
    "RetrievalIndex",
    "StepPrediction",
    "SynthModel",
    "catalog_fingerprint_matrix",
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
]
