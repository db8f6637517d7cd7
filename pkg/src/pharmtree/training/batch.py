"""Padded tensor batches for teacher forcing.

For a route of d steps the token sequence has d+1 positions: START, then the
fingerprint of every step product. Position i is supervised with the block
and reaction of step i; the final product's fingerprint is the input at the
position that targets the END row, matching free-running decode, where the
stop decision is made after seeing the last product. Reaction targets are
NONE at the seed position and at END.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..chem.api import canonicalize, morgan_fp
from ..errors import ReplayMismatch
from ..model.decoder import RXN_NONE, ModelConfig
from ..synthesis.catalog import FP_NBITS, FP_RADIUS, Catalog
from ..synthesis.dataset import TrainingTriple

END_ID = -1  # target marker for the END retrieval row


@dataclass(frozen=True)
class Batch:
    features: torch.Tensor      # (B, N, 6) float
    coords: torch.Tensor        # (B, N, 3) float
    point_mask: torch.Tensor    # (B, N) bool
    fp_tokens: torch.Tensor     # (B, L-1, fp_bits) float, tokens after START
    seq_mask: torch.Tensor      # (B, L) bool, one per position
    target_fps: torch.Tensor    # (B, L, fp_bits) float, zero rows at END/pad
    target_is_end: torch.Tensor  # (B, L) bool
    target_block_ids: torch.Tensor  # (B, L) long, END_ID at END positions
    target_rxns: torch.Tensor   # (B, L) long, vocabulary indices

    @property
    def n_sequences(self) -> int:
        return self.features.shape[0]

    def to(self, dtype: torch.dtype) -> "Batch":
        converted = [
            t.to(dtype) if t.is_floating_point() else t
            for t in (getattr(self, name) for name in self.__dataclass_fields__)
        ]
        return Batch(*converted)


def build_batch(
    triples: list[TrainingTriple],
    catalog: Catalog,
    cfg: ModelConfig,
) -> Batch:
    """Assemble padded tensors; raises ReplayMismatch when a route references
    a block the catalog does not contain."""
    B = len(triples)
    n_pts = max(t.graph.n_points for t in triples)
    seq_lens = [t.tree.depth + 1 for t in triples]
    L = max(seq_lens)
    bits = cfg.fp_bits

    features = torch.zeros(B, n_pts, 6)
    coords = torch.zeros(B, n_pts, 3)
    point_mask = torch.zeros(B, n_pts, dtype=torch.bool)
    fp_tokens = torch.zeros(B, L - 1, bits)
    seq_mask = torch.zeros(B, L, dtype=torch.bool)
    target_fps = torch.zeros(B, L, bits)
    target_is_end = torch.zeros(B, L, dtype=torch.bool)
    target_block_ids = torch.full((B, L), END_ID, dtype=torch.long)
    target_rxns = torch.full((B, L), RXN_NONE, dtype=torch.long)

    for b, triple in enumerate(triples):
        g = triple.graph
        n = g.n_points
        features[b, :n] = torch.from_numpy(np.asarray(g.features, dtype=np.float32))
        coords[b, :n] = torch.from_numpy(np.asarray(g.coords, dtype=np.float32))
        point_mask[b, :n] = True

        tree = triple.tree
        d = tree.depth
        seq_mask[b, : d + 1] = True
        for i, smiles in enumerate(tree.products):
            fp = morgan_fp(canonicalize(smiles), FP_RADIUS, FP_NBITS)
            fp_tokens[b, i] = torch.from_numpy(fp.to_array().astype(np.float32))
        for i, step in enumerate(tree.steps):
            if step.block is None:
                raise ReplayMismatch("training routes must be rooted in catalog blocks")
            block = catalog.get(step.block)
            target_fps[b, i] = torch.from_numpy(block.fp.to_array().astype(np.float32))
            target_block_ids[b, i] = step.block
            target_rxns[b, i] = cfg.rxn_index(step.reaction)
        target_is_end[b, d] = True
        # position d: target block END, reaction NONE (defaults already set)

    return Batch(
        features, coords, point_mask, fp_tokens, seq_mask,
        target_fps, target_is_end, target_block_ids, target_rxns,
    )
