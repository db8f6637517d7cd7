"""Central finite-difference verification of analytic gradients.

Runs in float64. For each parameter tensor a random subset of entries is
perturbed by ±step and the symmetric difference quotient is compared against
autograd, with relative error measured against max(|analytic|, |fd|, floor).
"""

from __future__ import annotations

import numpy as np
import torch

from ..model.decoder import SynthModel
from .batch import Batch
from .loss import total_loss

REL_FLOOR = 1e-6


def gradient_check(
    model: SynthModel,
    batch: Batch,
    n_per_tensor: int = 20,
    step: float = 1e-5,
    seed: int = 0,
) -> tuple[float, dict[str, float]]:
    """Returns (max relative error, per-tensor max). Converts nothing: the
    caller supplies a float64 model and batch."""
    model = model.double()
    batch = batch.to(torch.float64)
    rng = np.random.default_rng(seed)

    loss, _, _ = total_loss(model, batch)
    params = [(n, p) for n, p in model.named_parameters() if p.requires_grad]
    grads = torch.autograd.grad(loss, [p for _, p in params])

    def loss_at() -> float:
        with torch.no_grad():
            val, _, _ = total_loss(model, batch)
        return float(val)

    worst: dict[str, float] = {}
    for (name, p), g in zip(params, grads):
        flat = p.data.view(-1)
        n = min(n_per_tensor, flat.numel())
        picks = rng.choice(flat.numel(), size=n, replace=False)
        tensor_worst = 0.0
        for i in picks:
            orig = flat[i].item()
            flat[i] = orig + step
            up = loss_at()
            flat[i] = orig - step
            down = loss_at()
            flat[i] = orig
            fd = (up - down) / (2 * step)
            a = g.view(-1)[i].item()
            rel = abs(a - fd) / max(abs(a), abs(fd), REL_FLOOR)
            tensor_worst = max(tensor_worst, rel)
        worst[name] = tensor_worst
    return max(worst.values()), worst
