"""Optimization loop with per-epoch metrics and checkpoint emission.

Deterministic given the seed: math runs single-threaded, initialization is
governed by torch's seeded RNG, and batches are iterated in a fixed order.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import torch

from ..errors import DivergenceError
from ..model.checkpoint import Checkpoint, checkpoint_from_model, load_checkpoint, save_checkpoint
from ..model.decoder import DecoderConfig, ModelConfig, SynthModel
from ..model.egnn import EgnnConfig
from ..synthesis.catalog import Catalog
from ..synthesis.dataset import TrainingTriple
from ..synthesis.reaction import ReactionTemplate
from .batch import END_ID, Batch, build_batch
from .loss import block_loss, rxn_loss, target_block_rows, total_loss


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 3e-4
    batch_size: int = 64
    epochs: int = 500
    seed: int = 0
    d_model: int = 128
    grad_clip: float = 1.0
    # stop at the first epoch where both training accuracies reach this level;
    # None trains for the full epoch budget
    target_acc: float | None = None

    def __post_init__(self):
        if min(self.lr, self.batch_size, self.epochs + 1, self.d_model, self.grad_clip) <= 0:
            raise ValueError("TrainConfig fields must be positive (epochs may be 0)")
        if self.target_acc is not None and not 0.0 < self.target_acc <= 1.0:
            raise ValueError("target_acc must be in (0, 1]")

    def to_json(self) -> dict:
        return {
            "lr": self.lr, "batch_size": self.batch_size, "epochs": self.epochs,
            "seed": self.seed, "d_model": self.d_model, "grad_clip": self.grad_clip,
            "target_acc": self.target_acc,
        }


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    l_b: float
    l_rxn: float
    block_acc: float
    rxn_acc: float


def make_model(cfg: TrainConfig, templates: list[ReactionTemplate]) -> SynthModel:
    model_cfg = ModelConfig(
        egnn=EgnnConfig(out_dim=cfg.d_model),
        decoder=DecoderConfig(d_model=cfg.d_model),
        template_ids=tuple(sorted(t.id for t in templates)),
    )
    return SynthModel(model_cfg)


def _epoch_metrics(
    model: SynthModel,
    batches: list[Batch],
    catalog: Catalog,
    epoch: int,
) -> EpochMetrics:
    index = model.build_index(catalog)
    row_norms = torch.linalg.vector_norm(index.zprime, dim=1).clamp(min=1e-30)
    row_ids = torch.tensor(index.ids + [END_ID])
    unit_rows = (index.zprime / row_norms.unsqueeze(1)).T
    lb_sum = lr_sum = 0.0
    n_pos = 0
    block_hits = rxn_hits = 0
    with torch.no_grad():
        for batch in batches:
            valid = batch.seq_mask
            k = int(valid.sum())
            n_pos += k
            z = model.forward_sequence(
                batch.features, batch.coords, batch.point_mask, batch.fp_tokens
            )
            rows = target_block_rows(model, batch)
            lb_sum += block_loss(z, rows, valid).item() * k

            logits = model.reaction_logits(z, rows)
            lr_sum += rxn_loss(logits, batch.target_rxns, valid).item() * k
            rxn_hits += int(((logits.argmax(dim=-1) == batch.target_rxns) & valid).sum())

            zn = torch.linalg.vector_norm(z, dim=-1, keepdim=True).clamp(min=1e-30)
            picked = row_ids[((z / zn) @ unit_rows).argmax(dim=-1)]
            block_hits += int(((picked == batch.target_block_ids) & valid).sum())
    return EpochMetrics(
        epoch, lb_sum / n_pos, lr_sum / n_pos, block_hits / n_pos, rxn_hits / n_pos
    )


def train(
    triples: list[TrainingTriple],
    catalog: Catalog,
    templates: list[ReactionTemplate],
    config: TrainConfig,
    metrics_path: str | Path | None = None,
) -> tuple[Checkpoint, list[EpochMetrics]]:
    """Teacher-forced training; returns the final checkpoint and one metrics
    row per epoch. Raises DivergenceError when the loss leaves the reals."""
    if not triples:
        raise ValueError("empty dataset")
    torch.manual_seed(config.seed)
    torch.set_num_threads(1)
    model = make_model(config, templates)
    cfg = model.cfg

    batches = [
        build_batch(triples[i : i + config.batch_size], catalog, cfg)
        for i in range(0, len(triples), config.batch_size)
    ]

    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    metrics: list[EpochMetrics] = []
    for epoch in range(config.epochs):
        model.train()
        for batch in batches:
            opt.zero_grad()
            loss, _, _ = total_loss(model, batch)
            if not torch.isfinite(loss):
                raise DivergenceError(f"non-finite loss at epoch {epoch}")
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            opt.step()
        model.eval()
        metrics.append(_epoch_metrics(model, batches, catalog, epoch))
        if (
            config.target_acc is not None
            and metrics[-1].block_acc >= config.target_acc
            and metrics[-1].rxn_acc >= config.target_acc
        ):
            break

    model.eval()
    if config.epochs == 0:
        metrics.append(_epoch_metrics(model, batches, catalog, 0))
    if metrics_path is not None:
        write_metrics_csv(metrics, metrics_path)
    ckpt = checkpoint_from_model(model, config.to_json(), catalog.digest())
    return ckpt, metrics


def write_metrics_csv(metrics: list[EpochMetrics], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "L_B", "L_rxn", "block_acc", "rxn_acc"])
        for m in metrics:
            w.writerow([m.epoch, f"{m.l_b:.10f}", f"{m.l_rxn:.10f}",
                        f"{m.block_acc:.6f}", f"{m.rxn_acc:.6f}"])


def verify_checkpoint(ckpt: Checkpoint, probe_batch: Batch) -> bool:
    """Save, reload, and compare forward outputs bit-for-bit."""
    model = ckpt.build_model()
    with torch.no_grad():
        before = model.forward_sequence(
            probe_batch.features, probe_batch.coords,
            probe_batch.point_mask, probe_batch.fp_tokens,
        )
    fd, tmp = tempfile.mkstemp(suffix=".ckpt")
    os.close(fd)
    try:
        save_checkpoint(ckpt, tmp)
        reloaded = load_checkpoint(tmp).build_model()
    finally:
        os.unlink(tmp)
    with torch.no_grad():
        after = reloaded.forward_sequence(
            probe_batch.features, probe_batch.coords,
            probe_batch.point_mask, probe_batch.fp_tokens,
        )
    return before.numpy().tobytes() == after.numpy().tobytes()
