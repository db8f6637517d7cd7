"""Evolutionary route optimization.

Each cycle mutates every parent by swapping one reagent for a near neighbor
in the projected-fingerprint space, re-derives reactions which still apply
along the altered route, discards children that no longer replay, and keeps
the best individuals with strict elitism, so the best score never decreases.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable

from ..chem.api import Molecule, canonicalize
from ..errors import ExtinctPopulation, NoProduct, SanitizeError
from ..model.checkpoint import Checkpoint
from ..synthesis.catalog import Catalog
from ..synthesis.reaction import ReactionTemplate
from ..synthesis.tree import ORDER_SEED, ORDER_UNIMOL, SyntheticTree, TreeStep
from .generate import InferenceSession, _applicable_reactions, _as_session, _reactants
from .neighbors import nearest_rows


@dataclass(frozen=True)
class GaConfig:
    population: int = 16
    cycles: int = 3
    topk_parents: int = 4
    neighbor_k: int = 8

    def __post_init__(self):
        if min(self.population, self.cycles, self.topk_parents, self.neighbor_k) <= 0:
            raise ValueError("GaConfig fields must be positive")


@dataclass(frozen=True)
class Scorer:
    """Deterministic objective; higher is better."""

    name: str
    fn: Callable[[Molecule], float]

    def __call__(self, mol: Molecule) -> float:
        return self.fn(mol)


@dataclass(frozen=True)
class LineageEvent:
    cycle: int
    parent_id: int
    child_id: int
    mutated_step: int
    old_block: int
    new_block: int
    reaction: int | None
    score: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "cycle": self.cycle, "parent_id": self.parent_id,
                "child_id": self.child_id, "mutated_step": self.mutated_step,
                "old_block": self.old_block, "new_block": self.new_block,
                "reaction": self.reaction, "score": self.score,
            },
            sort_keys=True, separators=(",", ":"),
        )


def _rebuild_route(
    session: InferenceSession,
    tree: SyntheticTree,
    mut_step: int,
    new_block: int,
    rng: random.Random,
) -> SyntheticTree | None:
    """Replace the block at mut_step and re-derive every later reaction,
    sampling among the templates that still apply. None when the route dies."""
    steps: list[TreeStep] = list(tree.steps[:mut_step])
    products: list[str] = list(tree.products[:mut_step])
    current: Molecule | None = canonicalize(products[-1]) if products else None

    for i in range(mut_step, len(tree.steps)):
        old = tree.steps[i]
        block_id = new_block if i == mut_step else old.block
        if old.order == ORDER_SEED:
            if block_id is None:
                return None
            current = session.catalog.get(block_id).mol
            steps.append(TreeStep(block_id, None, ORDER_SEED))
            products.append(current.smiles)
            continue
        block_mol = session.catalog.get(block_id).mol
        allowed = _applicable_reactions(session, current, block_mol)
        if old.order == ORDER_UNIMOL and i != mut_step:
            # placeholder reagent: keep the recorded unimolecular step if it
            # still applies, otherwise the route is dead
            if old.reaction not in allowed:
                return None
            choices = [old.reaction]
        else:
            choices = sorted(allowed)
        product = None
        while choices:
            tid = choices.pop(rng.randrange(len(choices)))
            try:
                product = _apply(session, tid, allowed[tid], current, block_mol)
                break
            except (NoProduct, SanitizeError):
                product = None
        if product is None:
            return None
        steps.append(TreeStep(block_id, tid, allowed[tid]))
        current = product
        products.append(current.smiles)

    return SyntheticTree(steps=steps, products=products, final=products[-1])


def _apply(session, tid, order, current, block_mol) -> Molecule:
    from ..synthesis.reaction import apply_reaction

    return apply_reaction(session.templates[tid], _reactants(order, current, block_mol))


def _mutable_steps(tree: SyntheticTree) -> list[int]:
    return [
        i
        for i, s in enumerate(tree.steps)
        if s.block is not None and s.order != ORDER_UNIMOL
    ]


def optimize(
    seed_trees: list[SyntheticTree],
    ckpt: Checkpoint | InferenceSession,
    scorer: Scorer,
    ga_cfg: GaConfig,
    catalog: Catalog | None = None,
    templates: list[ReactionTemplate] | None = None,
    seed: int = 0,
) -> tuple[list[tuple[SyntheticTree, float]], list[LineageEvent]]:
    """Returns the final population ranked best-first plus the lineage log.
    Raises ExtinctPopulation when no individual survives a cycle."""
    session = _as_session(ckpt, catalog, templates)
    if not seed_trees:
        raise ExtinctPopulation("no seed routes")
    rng = random.Random(seed)

    scored = [(t, scorer(canonicalize(t.final))) for t in seed_trees]
    scored.sort(key=lambda p: -p[1])
    population = scored[: ga_cfg.population]
    next_id = len(population)
    ids = list(range(len(population)))
    events: list[LineageEvent] = []

    for cycle in range(ga_cfg.cycles):
        children: list[tuple[SyntheticTree, float]] = []
        child_ids: list[int] = []
        for pid, (tree, _) in zip(ids, population):
            mutable = _mutable_steps(tree)
            if not mutable:
                continue
            step_i = rng.choice(mutable)
            old_block = tree.steps[step_i].block
            neighbors = nearest_rows(session.index, old_block, ga_cfg.neighbor_k)
            if not neighbors:
                continue
            new_block = rng.choice(neighbors)
            child = _rebuild_route(session, tree, step_i, new_block, rng)
            if child is None:
                continue
            score = scorer(canonicalize(child.final))
            children.append((child, score))
            child_ids.append(next_id)
            events.append(
                LineageEvent(
                    cycle, pid, next_id, step_i, old_block, new_block,
                    child.steps[step_i].reaction, score,
                )
            )
            next_id += 1

        pool = list(zip(ids, population)) + list(zip(child_ids, children))
        pool.sort(key=lambda p: -p[1][1])
        if not pool:
            raise ExtinctPopulation(f"cycle {cycle}: nothing to select from")
        elites = pool[: ga_cfg.topk_parents]
        child_set = set(child_ids)
        fill = [
            p for p in pool[ga_cfg.topk_parents :] if p[0] in child_set
        ][: max(0, ga_cfg.population - len(elites))]
        selected = elites + fill
        ids = [pid for pid, _ in selected]
        population = [ind for _, ind in selected]

    return population, events
