"""E(3)-equivariant encoder over fully connected pharmacophore point sets.

Each layer computes pairwise messages from hidden states and squared
distances, updates coordinates along difference vectors, and updates hidden
states from aggregated messages. Hidden states are therefore invariant to
rotations and translations of the input coordinates while the coordinate
stream is equivariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from ..errors import ShapeMismatch

N_FEATURE_CLASSES = 6


@dataclass(frozen=True)
class EgnnConfig:
    n_layers: int = 7
    hidden: int = 128
    mlp_hidden: int = 128
    out_dim: int = 128


class EgnnLayer(nn.Module):
    """One message-passing layer.

    phi_e consumes (h_i, h_j, |x_i-x_j|^2, e_ij) with e_ij fixed to 1;
    phi_x gates the coordinate update with a single unbounded scalar;
    phi_h maps (h_i, sum_j m_ij) to the next hidden state, no residual.
    """

    def __init__(self, hidden: int, mlp_hidden: int) -> None:
        super().__init__()
        self.phi_e = nn.Sequential(
            nn.Linear(2 * hidden + 2, mlp_hidden),
            nn.SiLU(),
            nn.Linear(mlp_hidden, hidden),
            nn.SiLU(),
        )
        gate = nn.Linear(mlp_hidden, 1, bias=False)
        # The coordinate stream compounds across layers: unbounded gates make
        # each layer roughly cube the coordinate scale. A bounded hidden
        # activation and a near-zero initial gate keep it stable while the
        # update rule itself stays an unnormalized sum over neighbors.
        nn.init.xavier_uniform_(gate.weight, gain=1e-3)
        self.phi_x = nn.Sequential(
            nn.Linear(hidden, mlp_hidden),
            nn.Tanh(),
            gate,
        )
        self.phi_h = nn.Sequential(
            nn.Linear(2 * hidden, mlp_hidden),
            nn.SiLU(),
            nn.Linear(mlp_hidden, hidden),
        )

    def forward(
        self,
        h: torch.Tensor,
        x: torch.Tensor,
        mask: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """h: (B, N, H), x: (B, N, 3), mask: (B, N) bool. Padded rows stay zero."""
        if h.shape[:2] != x.shape[:2]:
            raise ShapeMismatch(f"h rows {tuple(h.shape[:2])} != x rows {tuple(x.shape[:2])}")
        B, N, H = h.shape
        diff = x.unsqueeze(2) - x.unsqueeze(1)              # (B, N, N, 3)
        dist2 = (diff * diff).sum(-1, keepdim=True)          # (B, N, N, 1)
        hi = h.unsqueeze(2).expand(B, N, N, H)
        hj = h.unsqueeze(1).expand(B, N, N, H)
        ones = torch.ones_like(dist2)
        pair = mask.unsqueeze(2) & mask.unsqueeze(1)         # (B, N, N)
        pair = pair & ~torch.eye(N, dtype=torch.bool, device=h.device).unsqueeze(0)
        m = self.phi_e(torch.cat([hi, hj, dist2, ones], dim=-1))
        m = m * pair.unsqueeze(-1)
        x_next = x + (diff * self.phi_x(m) * pair.unsqueeze(-1)).sum(dim=2)
        h_next = self.phi_h(torch.cat([h, m.sum(dim=2)], dim=-1))
        h_next = h_next * mask.unsqueeze(-1)
        x_next = torch.where(mask.unsqueeze(-1), x_next, x)
        return h_next, x_next


class PharmacophoreEncoder(nn.Module):
    """Stack of EGNN layers plus a linear lift of one-hot features and a
    final projection of hidden states to the decoder width.
    """

    def __init__(self, cfg: EgnnConfig) -> None:
        super().__init__()
        self.cfg = cfg
        self.embed = nn.Linear(N_FEATURE_CLASSES, cfg.hidden, bias=False)
        self.layers = nn.ModuleList(
            EgnnLayer(cfg.hidden, cfg.mlp_hidden) for _ in range(cfg.n_layers)
        )
        self.out_proj = nn.Linear(cfg.hidden, cfg.out_dim)

    def forward(
        self,
        features: torch.Tensor,
        coords: torch.Tensor,
        mask: torch.Tensor | None = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """features: (B, N, 6), coords: (B, N, 3), mask: (B, N) bool or None.

        Returns (h, x_out): h is (B, N, out_dim) with padded rows zeroed,
        x_out is (B, N, 3). x_out is exposed for equivariance testing only.
        """
        if features.shape[:2] != coords.shape[:2]:
            raise ShapeMismatch(
                f"features rows {tuple(features.shape[:2])} != coords rows {tuple(coords.shape[:2])}"
            )
        if mask is None:
            mask = torch.ones(features.shape[:2], dtype=torch.bool, device=features.device)
        h = self.embed(features) * mask.unsqueeze(-1)
        x = coords
        for layer in self.layers:
            h, x = layer(h, x, mask)
        h = self.out_proj(h) * mask.unsqueeze(-1)
        return h, x
