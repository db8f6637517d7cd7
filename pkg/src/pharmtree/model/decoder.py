"""Autoregressive decoder over fingerprint tokens with cross-attention to
encoder memory.

Token 0 is a learned START vector; later tokens are 4096-bit Morgan
fingerprints of the latest product, lifted by an MLP. Each position's output
vector Z selects the next building block by cosine similarity against an
index of projected block fingerprints (plus a learned END row), and the
reaction head reads the concatenation of Z with the projected fingerprint of
the chosen block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from ..errors import ShapeMismatch, ZeroVector
from ..synthesis.catalog import Catalog
from .egnn import EgnnConfig, PharmacophoreEncoder

RXN_NONE = 0  # reaction-vocabulary index reserved for "no reaction"


@dataclass(frozen=True)
class DecoderConfig:
    d_model: int = 128
    n_heads: int = 8
    n_layers: int = 7
    ff_dim: int = 512
    token_hidden: int = 512
    max_len: int = 16


@dataclass(frozen=True)
class ModelConfig:
    egnn: EgnnConfig = field(default_factory=EgnnConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    fp_bits: int = 4096
    template_ids: tuple[int, ...] = ()

    def __post_init__(self):
        # reaction vocabulary is ordered by template id regardless of input order
        object.__setattr__(self, "template_ids", tuple(sorted(self.template_ids)))

    @property
    def n_reactions(self) -> int:
        """Vocabulary size: NONE plus one entry per template."""
        return 1 + len(self.template_ids)

    def rxn_index(self, template_id: int | None) -> int:
        if template_id is None:
            return RXN_NONE
        return 1 + self.template_ids.index(template_id)

    def rxn_template_id(self, index: int) -> int | None:
        if index == RXN_NONE:
            return None
        return self.template_ids[index - 1]

    def to_json(self) -> dict:
        return {
            "egnn": vars(self.egnn).copy(),
            "decoder": vars(self.decoder).copy(),
            "fp_bits": self.fp_bits,
            "template_ids": list(self.template_ids),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ModelConfig":
        return cls(
            egnn=EgnnConfig(**obj["egnn"]),
            decoder=DecoderConfig(**obj["decoder"]),
            fp_bits=obj["fp_bits"],
            template_ids=tuple(obj["template_ids"]),
        )


def sinusoidal_pe(max_len: int, d_model: int) -> torch.Tensor:
    """Standard sin/cos positional table, shape (max_len, d_model)."""
    pos = torch.arange(max_len, dtype=torch.float64).unsqueeze(1)
    idx = torch.arange(0, d_model, 2, dtype=torch.float64)
    angle = pos / torch.pow(10000.0, idx / d_model)
    pe = torch.zeros(max_len, d_model, dtype=torch.float64)
    pe[:, 0::2] = torch.sin(angle)
    pe[:, 1::2] = torch.cos(angle)
    return pe.to(torch.float32)


class MultiheadAttention(nn.Module):
    """Scaled dot-product attention with per-head projections.

    Masked positions receive -inf before softmax so their weights are
    exactly zero; a perturbation behind a causal mask cannot change earlier
    outputs even at the bit level.
    """

    def __init__(self, d_model: int, n_heads: int) -> None:
        super().__init__()
        if d_model % n_heads != 0:
            raise ShapeMismatch(f"d_model {d_model} not divisible by {n_heads} heads")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.wq = nn.Linear(d_model, d_model)
        self.wk = nn.Linear(d_model, d_model)
        self.wv = nn.Linear(d_model, d_model)
        self.wo = nn.Linear(d_model, d_model)

    def forward(
        self,
        query: torch.Tensor,
        keyval: torch.Tensor,
        causal: bool = False,
        key_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        B, Tq, D = query.shape
        Tk = keyval.shape[1]
        q = self.wq(query).view(B, Tq, self.n_heads, self.d_head).transpose(1, 2)
        k = self.wk(keyval).view(B, Tk, self.n_heads, self.d_head).transpose(1, 2)
        v = self.wv(keyval).view(B, Tk, self.n_heads, self.d_head).transpose(1, 2)
        scores = q @ k.transpose(-1, -2) / math.sqrt(self.d_head)
        if causal:
            future = torch.triu(
                torch.ones(Tq, Tk, dtype=torch.bool, device=query.device), diagonal=1
            )
            scores = scores.masked_fill(future, float("-inf"))
        if key_mask is not None:
            scores = scores.masked_fill(~key_mask[:, None, None, :], float("-inf"))
        w = torch.softmax(scores, dim=-1)
        out = (w @ v).transpose(1, 2).reshape(B, Tq, D)
        return self.wo(out)


class DecoderLayer(nn.Module):
    """Pre-norm block: causal self-attention, cross-attention, feed-forward."""

    def __init__(self, cfg: DecoderConfig) -> None:
        super().__init__()
        self.ln1 = nn.LayerNorm(cfg.d_model)
        self.self_attn = MultiheadAttention(cfg.d_model, cfg.n_heads)
        self.ln2 = nn.LayerNorm(cfg.d_model)
        self.cross_attn = MultiheadAttention(cfg.d_model, cfg.n_heads)
        self.ln3 = nn.LayerNorm(cfg.d_model)
        self.ff = nn.Sequential(
            nn.Linear(cfg.d_model, cfg.ff_dim),
            nn.SiLU(),
            nn.Linear(cfg.ff_dim, cfg.d_model),
        )

    def forward(
        self,
        x: torch.Tensor,
        memory: torch.Tensor,
        mem_mask: torch.Tensor | None,
    ) -> torch.Tensor:
        y = self.ln1(x)
        x = x + self.self_attn(y, y, causal=True)
        x = x + self.cross_attn(self.ln2(x), memory, key_mask=mem_mask)
        x = x + self.ff(self.ln3(x))
        return x


@dataclass(frozen=True)
class StepPrediction:
    """One decoding step: representation, chosen block (None = END), and the
    reaction distribution conditioned on that block."""

    z: np.ndarray
    block_id: int | None
    rxn_probs: np.ndarray


class RetrievalIndex:
    """Projected fingerprint rows for every catalog block plus the learned
    END row (last). Rebuilt whenever the projection parameters change."""

    def __init__(self, zprime: torch.Tensor, ids: list[int], catalog_hash: str) -> None:
        if zprime.shape[0] != len(ids) + 1:
            raise ShapeMismatch(f"{zprime.shape[0]} rows for {len(ids)} ids plus END")
        self.zprime = zprime
        self.ids = ids
        self.catalog_hash = catalog_hash

    def __len__(self) -> int:
        return self.zprime.shape[0]


def cosine_rows(z: torch.Tensor, rows: torch.Tensor) -> torch.Tensor:
    """Cosine of z against each row; rows of zero norm score -2 (never win)."""
    zn = torch.linalg.vector_norm(z)
    if zn.item() == 0.0:
        raise ZeroVector("cannot rank blocks from a zero representation")
    rn = torch.linalg.vector_norm(rows, dim=1)
    cos = (rows @ z) / (rn * zn)
    return torch.where(rn == 0, torch.full_like(cos, -2.0), cos)


def select_block(z: torch.Tensor, index: RetrievalIndex) -> int | None:
    """Argmax cosine over the index; ties go to the smallest block id, with
    END (None) losing ties against any block. Returns None for END."""
    cos = cosine_rows(z, index.zprime)
    n_blocks = len(index.ids)
    best: int | None = None
    best_key: tuple[float, int, int] | None = None
    for row in range(len(index)):
        is_end = row == n_blocks
        bid = -1 if is_end else index.ids[row]
        key = (cos[row].item(), 0 if is_end else 1, -bid)
        if best_key is None or key > best_key:
            best_key = key
            best = row
    return None if best == n_blocks else index.ids[best]


def sample_block(
    z: torch.Tensor,
    index: RetrievalIndex,
    rng,
    top_k: int = 16,
    temperature: float = 1.0,
) -> int | None:
    """Sample among the top_k rows by cosine, softmax at `temperature`.
    Diversity source for multi-sample workflows; argmax remains the default
    decoding rule. Returns None for END."""
    cos = cosine_rows(z, index.zprime)
    k = min(top_k, len(index))
    top = torch.topk(cos, k)
    logits = (top.values / temperature).to(torch.float64)
    probs = torch.softmax(logits, dim=0).numpy()
    pick = rng.choices(range(k), weights=probs.tolist(), k=1)[0]
    row = int(top.indices[pick].item())
    return None if row == len(index.ids) else index.ids[row]


class SynthModel(nn.Module):
    """Encoder + decoder + block projection + reaction head."""

    def __init__(self, cfg: ModelConfig) -> None:
        super().__init__()
        self.cfg = cfg
        d = cfg.decoder.d_model
        self.encoder = PharmacophoreEncoder(cfg.egnn)
        self.token_mlp = nn.Sequential(
            nn.Linear(cfg.fp_bits, cfg.decoder.token_hidden),
            nn.SiLU(),
            nn.Linear(cfg.decoder.token_hidden, d),
        )
        self.start_embed = nn.Parameter(torch.zeros(d))
        self.end_embed = nn.Parameter(torch.zeros(d))
        self.register_buffer("pe", sinusoidal_pe(cfg.decoder.max_len, d))
        self.layers = nn.ModuleList(
            DecoderLayer(cfg.decoder) for _ in range(cfg.decoder.n_layers)
        )
        self.mem_ln = nn.LayerNorm(d)
        self.final_ln = nn.LayerNorm(d)
        self.block_proj = nn.Linear(cfg.fp_bits, d)
        self.rxn_head = nn.Linear(2 * d, cfg.n_reactions)
        self._init_embeddings()

    def _init_embeddings(self) -> None:
        gen = torch.Generator().manual_seed(0)
        with torch.no_grad():
            self.start_embed.normal_(0.0, 0.02, generator=gen)
            self.end_embed.normal_(0.0, 0.02, generator=gen)

    # -- encoder side ---------------------------------------------------

    def encode(
        self,
        features: torch.Tensor,
        coords: torch.Tensor,
        mask: torch.Tensor | None = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        return self.encoder(features, coords, mask)

    # -- decoder side ---------------------------------------------------

    def embed_sequence(self, fp_tokens: torch.Tensor) -> torch.Tensor:
        """fp_tokens: (B, T, fp_bits) fingerprints following START. Returns
        (B, T+1, d_model) with START at position 0 and positional encoding
        added everywhere."""
        B, T, _ = fp_tokens.shape
        if T + 1 > self.pe.shape[0]:
            raise ShapeMismatch(f"sequence length {T + 1} exceeds PE table {self.pe.shape[0]}")
        start = self.start_embed.unsqueeze(0).expand(B, 1, -1)
        if T > 0:
            emb = torch.cat([start, self.token_mlp(fp_tokens)], dim=1)
        else:
            emb = start
        return emb + self.pe[: T + 1].to(emb.dtype)

    def decode(
        self,
        embedded: torch.Tensor,
        memory: torch.Tensor,
        mem_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        """Returns Z per position, (B, L, d_model). Z_i sees tokens <= i only."""
        if memory.shape[1] == 0:
            raise ShapeMismatch("decoder requires a non-empty memory")
        x = embedded
        memory = self.mem_ln(memory)
        for layer in self.layers:
            x = layer(x, memory, mem_mask)
        return self.final_ln(x)

    def forward_sequence(
        self,
        features: torch.Tensor,
        coords: torch.Tensor,
        point_mask: torch.Tensor,
        fp_tokens: torch.Tensor,
    ) -> torch.Tensor:
        """Full pass: encode points, embed tokens, decode. Returns Z."""
        memory, _ = self.encode(features, coords, point_mask)
        embedded = self.embed_sequence(fp_tokens)
        return self.decode(embedded, memory, point_mask)

    # -- retrieval and reaction ------------------------------------------

    def project_block(self, fp: torch.Tensor) -> torch.Tensor:
        """Affine lift of a 4096-bit fingerprint to d_model (works batched)."""
        return self.block_proj(fp)

    def build_index(self, catalog: Catalog) -> RetrievalIndex:
        fps, ids = catalog_fingerprint_matrix(catalog)
        dtype = self.block_proj.weight.dtype
        with torch.no_grad():
            rows = self.project_block(torch.from_numpy(fps).to(dtype))
            rows = torch.cat([rows, self.end_embed.detach().unsqueeze(0)], dim=0)
        return RetrievalIndex(rows, ids, catalog.digest())

    def predict_reaction(self, z: torch.Tensor, fp_next_block: torch.Tensor) -> torch.Tensor:
        """Softmax over the reaction vocabulary (NONE at index 0)."""
        zp = self.project_block(fp_next_block)
        logits = self.rxn_head(torch.cat([z, zp], dim=-1))
        return torch.softmax(logits, dim=-1)

    def reaction_logits(self, z: torch.Tensor, zprime: torch.Tensor) -> torch.Tensor:
        """Logits from already-projected block rows (training path)."""
        return self.rxn_head(torch.cat([z, zprime], dim=-1))


def catalog_fingerprint_matrix(catalog: Catalog) -> tuple[np.ndarray, list[int]]:
    """Dense float32 fingerprint matrix in catalog order plus aligned ids."""
    n = len(catalog)
    first = catalog.blocks[0]
    fps = np.zeros((n, first.fp.nbits), dtype=np.float32)
    ids = []
    for row, block in enumerate(catalog.blocks):
        fps[row] = block.fp.to_array().astype(np.float32)
        ids.append(block.id)
    return fps, ids
