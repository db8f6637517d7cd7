"""Synthetic trees: ordered (block, reaction) steps whose replay yields
the final molecule.

Step orientation is recorded in `order`: 0 marks the seed step (no
reaction), 1 a bimolecular step run as (current product, block), 2 the
swapped orientation (block, current product), and 3 a unimolecular step
where the recorded block is an unused placeholder.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from ..chem.api import Molecule, canonicalize
from ..chem.mol import SanitizeError
from ..errors import NoProduct, ReplayMismatch, SamplingExhausted
from .catalog import Catalog
from .reaction import ReactionTemplate, applicable, apply_reaction

ORDER_SEED = 0
ORDER_FORWARD = 1
ORDER_SWAPPED = 2
ORDER_UNIMOL = 3

_STEP_BUDGET = 50


@dataclass(frozen=True)
class TreeStep:
    block: int | None       # None only for out-of-catalog roots
    reaction: int | None    # None at the seed step
    order: int
    smiles: str | None = None  # root SMILES when block is None

    def to_json(self) -> dict:
        obj: dict = {"block": self.block, "reaction": self.reaction, "order": self.order}
        if self.smiles is not None:
            obj["smiles"] = self.smiles
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "TreeStep":
        return cls(obj["block"], obj["reaction"], obj["order"], obj.get("smiles"))


@dataclass(frozen=True)
class SyntheticTree:
    steps: list[TreeStep]
    products: list[str]     # canonical SMILES per step
    final: str              # canonical SMILES, equals products[-1]

    @property
    def depth(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "products": list(self.products),
            "final": self.final,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SyntheticTree":
        return cls(
            [TreeStep.from_json(s) for s in obj["steps"]],
            list(obj["products"]),
            obj["final"],
        )

    def to_jsonl(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)


def _root_molecule(step: TreeStep, catalog: Catalog) -> Molecule:
    if step.block is not None:
        return catalog.get(step.block).mol
    if step.smiles is None:
        raise ReplayMismatch("seed step has neither block id nor smiles")
    return canonicalize(step.smiles)


def replay(
    tree: SyntheticTree,
    catalog: Catalog,
    templates: list[ReactionTemplate],
) -> Molecule:
    """Recompute every product; raises ReplayMismatch on any difference."""
    by_id = {t.id: t for t in templates}
    if not tree.steps:
        raise ReplayMismatch("empty tree")
    current = _root_molecule(tree.steps[0], catalog)
    recomputed = [current.smiles]
    for step in tree.steps[1:]:
        if step.reaction is None:
            raise ReplayMismatch("non-seed step without a reaction id")
        template = by_id.get(step.reaction)
        if template is None:
            raise ReplayMismatch(f"unknown reaction id {step.reaction}")
        if step.order == ORDER_UNIMOL:
            current = apply_reaction(template, (current,))
        elif step.order == ORDER_FORWARD:
            block = catalog.get(step.block).mol
            current = apply_reaction(template, (current, block))
        elif step.order == ORDER_SWAPPED:
            block = catalog.get(step.block).mol
            current = apply_reaction(template, (block, current))
        else:
            raise ReplayMismatch(f"bad step order {step.order}")
        recomputed.append(current.smiles)
    if recomputed != tree.products:
        raise ReplayMismatch(
            f"recomputed products {recomputed} != stored {tree.products}"
        )
    return current


def extend_tree(
    current: Molecule,
    catalog: Catalog,
    templates: list[ReactionTemplate],
    rng: random.Random,
) -> tuple[TreeStep, Molecule]:
    """One random applicable step from `current`; SamplingExhausted on budget."""
    for _ in range(_STEP_BUDGET):
        template = templates[rng.randrange(len(templates))]
        block = catalog.blocks[rng.randrange(len(catalog))]
        try:
            if template.arity == 1:
                if not applicable(template, (current,)):
                    continue
                product = apply_reaction(template, (current,))
                step = TreeStep(block.id, template.id, ORDER_UNIMOL)
            elif applicable(template, (current, block.mol)):
                product = apply_reaction(template, (current, block.mol))
                step = TreeStep(block.id, template.id, ORDER_FORWARD)
            elif applicable(template, (block.mol, current)):
                product = apply_reaction(template, (block.mol, current))
                step = TreeStep(block.id, template.id, ORDER_SWAPPED)
            else:
                continue
        except (NoProduct, SanitizeError):
            continue
        return step, product
    raise SamplingExhausted(f"no applicable step within {_STEP_BUDGET} tries")


def sample_tree(
    catalog: Catalog,
    templates: list[ReactionTemplate],
    max_depth: int,
    rng: random.Random,
) -> SyntheticTree:
    """Random replay-valid tree; depth uniform in [1, max_depth].

    When the step budget runs out mid-build the tree is truncated at its
    last valid product (always at least the seed block).
    """
    depth = rng.randint(1, max_depth)
    root = catalog.blocks[rng.randrange(len(catalog))]
    steps = [TreeStep(root.id, None, ORDER_SEED)]
    products = [root.mol.smiles]
    current = root.mol
    for _ in range(depth - 1):
        try:
            step, current = extend_tree(current, catalog, templates, rng)
        except SamplingExhausted:
            break
        steps.append(step)
        products.append(current.smiles)
    return SyntheticTree(steps, products, products[-1])
