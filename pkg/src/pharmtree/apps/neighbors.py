"""Reagent neighborhoods in the projected-fingerprint space.

Blocks are compared by the cosine of their projected catalog rows, so the
neighborhood reflects what the trained projection considers interchangeable
rather than raw fingerprint overlap.
"""

from __future__ import annotations

import numpy as np

from ..errors import UnknownBlock
from ..model.checkpoint import Checkpoint
from ..model.decoder import RetrievalIndex
from ..synthesis.catalog import Catalog
from ..synthesis.reaction import ReactionTemplate
from .generate import InferenceSession, _as_session


def _block_rows(index: RetrievalIndex) -> tuple[np.ndarray, list[int]]:
    """Catalog rows only; the trailing end-of-sequence row is not a block."""
    rows = index.zprime.detach().cpu().double().numpy()[:-1]
    ids = list(index.ids)
    return rows, ids


def _neighbor_table(
    index: RetrievalIndex, block_id: int
) -> list[tuple[int, float]]:
    rows, ids = _block_rows(index)
    try:
        qi = ids.index(block_id)
    except ValueError:
        raise UnknownBlock(f"block {block_id} is not in the index")
    q = rows[qi]
    qn = np.linalg.norm(q)
    norms = np.linalg.norm(rows, axis=1)
    denom = np.maximum(norms * qn, 1e-300)
    cos = rows @ q / denom
    # identical projected rows must compare as exactly 1.0, not 0.999...
    exact = np.all(rows == q, axis=1)
    cos[exact] = 1.0
    order = sorted(
        (i for i in range(len(ids)) if i != qi),
        key=lambda i: (-cos[i], ids[i]),
    )
    return [(ids[i], float(cos[i])) for i in order]


def nearest_blocks(
    block_id: int,
    ckpt: Checkpoint | InferenceSession,
    catalog: Catalog,
    templates: list[ReactionTemplate] | None = None,
    k: int = 8,
) -> list[tuple[int, float]]:
    """k nearest catalog blocks to block_id by projected-row cosine,
    best first, ties broken by smaller id; the query itself is excluded."""
    catalog.get(block_id)
    session = _as_session(ckpt, catalog, templates or [])
    return _neighbor_table(session.index, block_id)[:k]


def nearest_rows(index: RetrievalIndex, block_id: int, k: int) -> list[int]:
    """Neighbor ids straight from an existing index; used by the optimizer."""
    return [bid for bid, _ in _neighbor_table(index, block_id)[:k]]
