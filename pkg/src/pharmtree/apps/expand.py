"""Hit expansion: decode analogs rooted at a known active molecule.

The token sequence is primed with [START, fp(seed)] and the current product
starts as the seed, so every emitted route begins at the seed and extends it
by at least one reaction. Diversity comes from top-k block sampling with a
distinct stream seed per analog.
"""

from __future__ import annotations

import random

from ..chem.api import Molecule, PharmacophoreGraph, extract_pharmacophores, gen_conformer
from ..errors import DeadEnd
from ..model.checkpoint import Checkpoint
from ..synthesis.catalog import Catalog
from ..synthesis.reaction import ReactionTemplate
from ..synthesis.tree import ORDER_SEED, SyntheticTree, TreeStep
from .generate import (
    GenerationConfig,
    InferenceSession,
    _as_session,
    _decode_route,
    _encode_graph,
)

_ATTEMPTS_PER_ANALOG = 25


def hit_expand(
    seed_mol: Molecule,
    ckpt: Checkpoint | InferenceSession,
    catalog: Catalog,
    templates: list[ReactionTemplate],
    n: int,
    cfg: GenerationConfig | None = None,
    seed: int = 0,
    graph: PharmacophoreGraph | None = None,
) -> list[SyntheticTree]:
    """n routes rooted at seed_mol. The decoder is conditioned on `graph`
    when given, otherwise on the pharmacophore of a conformer of the seed.
    Raises DeadEnd when no sampled block admits any reaction with the seed."""
    session = _as_session(ckpt, catalog, templates)
    cfg = cfg or GenerationConfig()
    if graph is None:
        graph = extract_pharmacophores(gen_conformer(seed_mol, seed=seed))
    memory = _encode_graph(session.model, graph)

    out: list[SyntheticTree] = []
    for k in range(n):
        rng = random.Random((seed << 20) + k)
        route = None
        for _ in range(_ATTEMPTS_PER_ANALOG):
            root = TreeStep(None, None, ORDER_SEED, smiles=seed_mol.smiles)
            tree = _decode_route(
                session,
                memory,
                cfg,
                steps=[root],
                products=[seed_mol.smiles],
                current=seed_mol,
                rng=rng,
            )
            if tree.depth >= 2:
                route = tree
                break
        if route is None:
            raise DeadEnd(f"no reaction extends the seed after analog {len(out)}")
        out.append(route)
    return out
