"""Training losses: cosine block loss and reaction cross-entropy.

The block loss is the mean over valid positions of 1 - cosine(Z_i, Z'_i),
where Z'_i is the projected fingerprint of the target block (the learned END
row at terminal positions). Minimizing it maximizes the mean cosine. The
reaction loss is the mean cross-entropy over the same positions.
"""

from __future__ import annotations

import torch

from ..errors import ZeroVector
from ..model.decoder import SynthModel
from .batch import Batch


def block_loss(z: torch.Tensor, target_rows: torch.Tensor, valid: torch.Tensor) -> torch.Tensor:
    """z, target_rows: (B, L, d); valid: (B, L) bool. Mean of 1 - cosine."""
    zn = torch.linalg.vector_norm(z, dim=-1)
    tn = torch.linalg.vector_norm(target_rows, dim=-1)
    if ((zn == 0) & valid).any() or ((tn == 0) & valid).any():
        raise ZeroVector("zero-norm vector at an unmasked position")
    cos = (z * target_rows).sum(-1) / (zn * tn).clamp(min=1e-30)
    per_pos = (1.0 - cos) * valid
    return per_pos.sum() / valid.sum()


def rxn_loss(logits: torch.Tensor, targets: torch.Tensor, valid: torch.Tensor) -> torch.Tensor:
    """logits: (B, L, K); targets: (B, L) long. Mean cross-entropy."""
    logp = torch.log_softmax(logits, dim=-1)
    picked = logp.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    return -(picked * valid).sum() / valid.sum()


def target_block_rows(model: SynthModel, batch: Batch) -> torch.Tensor:
    """Projected target rows: W·fp+b for block targets, end_embed at END."""
    rows = model.project_block(batch.target_fps)
    end = model.end_embed.to(rows.dtype).expand_as(rows)
    return torch.where(batch.target_is_end.unsqueeze(-1), end, rows)


def total_loss(
    model: SynthModel,
    batch: Batch,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Returns (L, L_B, L_rxn) with L = L_B + L_rxn, differentiable."""
    z = model.forward_sequence(
        batch.features, batch.coords, batch.point_mask, batch.fp_tokens
    )
    rows = target_block_rows(model, batch)
    lb = block_loss(z, rows, batch.seq_mask)
    logits = model.reaction_logits(z, rows)
    lr = rxn_loss(logits, batch.target_rxns, batch.seq_mask)
    return lb + lr, lb, lr
