"""Teacher-forced training: batch assembly, cosine/cross-entropy losses,
the optimization loop, and finite-difference gradient verification.
"""

from .batch import Batch, build_batch
from .loss import block_loss, rxn_loss, total_loss
from .train import EpochMetrics, TrainConfig, train, verify_checkpoint, write_metrics_csv
from .gradcheck import gradient_check

__all__ = [
    "Batch",
    "build_batch",
    "block_loss",
    "rxn_loss",
    "total_loss",
    "EpochMetrics",
    "TrainConfig",
    "train",
    "verify_checkpoint",
    "write_metrics_csv",
    "gradient_check",
]
