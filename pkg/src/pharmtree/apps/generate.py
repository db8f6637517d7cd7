"""Autoregressive route generation conditioned on a pharmacophore graph.

Each step decodes the token sequence, retrieves a building block, and picks
a reaction among those that actually apply to (current product, block), so
every emitted route replays. Inapplicable predictions fall back to END
rather than emitting an unmakeable molecule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
import torch

from ..chem.api import Molecule, PharmacophoreGraph, canonicalize, morgan_fp
from ..errors import ChecksumError, DeadEnd, NoProduct, SanitizeError
from ..model.checkpoint import Checkpoint
from ..model.decoder import RetrievalIndex, SynthModel, sample_block, select_block
from ..synthesis.catalog import FP_NBITS, FP_RADIUS, Catalog
from ..synthesis.reaction import ReactionTemplate, applicable, apply_reaction
from ..synthesis.tree import (
    ORDER_FORWARD,
    ORDER_SEED,
    ORDER_SWAPPED,
    ORDER_UNIMOL,
    SyntheticTree,
    TreeStep,
)


@dataclass(frozen=True)
class GenerationConfig:
    max_steps: int = 4
    mask_inapplicable: bool = True
    top_k: int = 16          # candidate pool for sampled (non-argmax) decoding
    temperature: float = 1.0

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


class InferenceSession:
    """Checkpoint unpacked for repeated decoding: model in eval mode, the
    retrieval index, and templates keyed by id."""

    def __init__(
        self,
        model: SynthModel,
        index: RetrievalIndex,
        catalog: Catalog,
        templates: list[ReactionTemplate],
    ) -> None:
        self.model = model
        self.index = index
        self.catalog = catalog
        self.templates = {t.id: t for t in templates}

    @classmethod
    def open(
        cls,
        ckpt: Checkpoint,
        catalog: Catalog,
        templates: list[ReactionTemplate],
    ) -> "InferenceSession":
        if ckpt.catalog_hash != catalog.digest():
            raise ChecksumError("checkpoint was trained against a different catalog")
        model = ckpt.build_model()
        torch.set_num_threads(1)
        return cls(model, model.build_index(catalog), catalog, templates)


def _as_session(ckpt, catalog, templates) -> InferenceSession:
    if isinstance(ckpt, InferenceSession):
        return ckpt
    return InferenceSession.open(ckpt, catalog, templates)


def _fp_tensor(mol: Molecule) -> torch.Tensor:
    fp = morgan_fp(mol, FP_RADIUS, FP_NBITS)
    return torch.from_numpy(fp.to_array().astype(np.float32))


def _encode_graph(model: SynthModel, graph: PharmacophoreGraph) -> torch.Tensor:
    feats = torch.from_numpy(np.asarray(graph.features, dtype=np.float32)).unsqueeze(0)
    coords = torch.from_numpy(np.asarray(graph.coords, dtype=np.float32)).unsqueeze(0)
    memory, _ = model.encode(feats, coords)
    return memory


def _applicable_reactions(
    session: InferenceSession,
    current: Molecule,
    block_mol: Molecule,
) -> dict[int, int]:
    """template id -> step order for reactions that fit (current, block)."""
    out: dict[int, int] = {}
    for tid, tmpl in session.templates.items():
        if tmpl.arity == 1:
            if applicable(tmpl, [current]):
                out[tid] = ORDER_UNIMOL
        else:
            if applicable(tmpl, [current, block_mol]):
                out[tid] = ORDER_FORWARD
            elif applicable(tmpl, [block_mol, current]):
                out[tid] = ORDER_SWAPPED
    return out


def _reactants(order: int, current: Molecule, block_mol: Molecule) -> list[Molecule]:
    if order == ORDER_UNIMOL:
        return [current]
    if order == ORDER_SWAPPED:
        return [block_mol, current]
    return [current, block_mol]


def _decode_route(
    session: InferenceSession,
    memory: torch.Tensor,
    cfg: GenerationConfig,
    steps: list[TreeStep],
    products: list[str],
    current: Molecule | None,
    rng: random.Random | None = None,
) -> SyntheticTree:
    """Shared loop behind generate and hit expansion. `steps`/`products`/
    `current` carry any primed prefix; rng switches block choice from argmax
    to top-k sampling. Raises DeadEnd if no step at all can be emitted."""
    model = session.model
    mcfg = model.cfg
    fps = [_fp_tensor(canonicalize(p)) for p in products]

    while len(steps) < cfg.max_steps:
        with torch.no_grad():
            tokens = (
                torch.stack(fps).unsqueeze(0)
                if fps
                else torch.zeros(1, 0, mcfg.fp_bits)
            )
            z = model.decode(model.embed_sequence(tokens), memory)[0, -1]
            if rng is None:
                block_id = select_block(z, session.index)
            else:
                block_id = sample_block(z, session.index, rng, cfg.top_k, cfg.temperature)

        if block_id is None:
            if not steps:
                raise DeadEnd("END emitted before any building block")
            break

        block_mol = session.catalog.get(block_id).mol
        if current is None:
            steps.append(TreeStep(block_id, None, ORDER_SEED))
            current = block_mol
            products.append(current.smiles)
            fps.append(_fp_tensor(current))
            continue

        allowed = _applicable_reactions(session, current, block_mol)
        if not allowed:
            break
        with torch.no_grad():
            probs = model.predict_reaction(z, _fp_tensor(block_mol)).numpy()
        order: list[int] = sorted(
            allowed,
            key=lambda tid: (-probs[mcfg.rxn_index(tid)], tid),
        )
        if not cfg.mask_inapplicable:
            best = int(np.argmax(probs[1:])) + 1  # NONE never applies after step 0
            tid = mcfg.rxn_template_id(best)
            order = [tid] if tid in allowed else []

        applied = None
        for tid in order:
            reactants = _reactants(allowed[tid], current, block_mol)
            try:
                applied = (tid, apply_reaction(session.templates[tid], reactants))
                break
            except (NoProduct, SanitizeError):
                continue
        if applied is None:
            break

        tid, product = applied
        steps.append(TreeStep(block_id, tid, allowed[tid]))
        current = product
        products.append(current.smiles)
        fps.append(_fp_tensor(current))

    return SyntheticTree(steps=steps, products=products, final=products[-1])


def generate(
    graph: PharmacophoreGraph,
    ckpt: Checkpoint | InferenceSession,
    catalog: Catalog,
    templates: list[ReactionTemplate],
    cfg: GenerationConfig | None = None,
) -> SyntheticTree:
    """Deterministic argmax decoding; the returned tree replays by
    construction. Raises DeadEnd when END is the very first choice."""
    session = _as_session(ckpt, catalog, templates)
    cfg = cfg or GenerationConfig()
    memory = _encode_graph(session.model, graph)
    return _decode_route(session, memory, cfg, steps=[], products=[], current=None)
