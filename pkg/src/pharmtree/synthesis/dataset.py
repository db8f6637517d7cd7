"""Training-triple generation: random trees paired with pharmacophores."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from ..chem.api import (
    PharmacophoreGraph,
    PharmacophorePoint,
    canonicalize,
    extract_pharmacophores,
    gen_conformer,
)
from ..errors import EmbedFailure, EmptyPharmacophore
from ..chem.mol import SanitizeError
from .catalog import Catalog
from .reaction import ReactionTemplate
from .tree import SyntheticTree, sample_tree

_SEED_SPAN = 2**31


@dataclass(frozen=True)
class TrainingTriple:
    graph: PharmacophoreGraph
    tree: SyntheticTree
    conformer_seed: int

    def to_json(self) -> dict:
        obj = self.tree.to_json()
        obj["points"] = [
            {"class": p.feature, "xyz": [p.xyz[0], p.xyz[1], p.xyz[2]]}
            for p in self.graph.to_points()
        ]
        obj["conformer_seed"] = self.conformer_seed
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingTriple":
        points = [
            PharmacophorePoint(p["class"], (p["xyz"][0], p["xyz"][1], p["xyz"][2]))
            for p in obj["points"]
        ]
        return cls(
            PharmacophoreGraph.from_points(points),
            SyntheticTree.from_json(obj),
            obj["conformer_seed"],
        )


def make_dataset(
    catalog: Catalog,
    templates: list[ReactionTemplate],
    n: int,
    max_depth: int,
    seed: int,
) -> Iterator[TrainingTriple]:
    """Yield exactly n triples; unembeddable/featureless finals are replaced."""
    rng = random.Random(seed)
    produced = 0
    while produced < n:
        tree = sample_tree(catalog, templates, max_depth, rng)
        conformer_seed = rng.randrange(_SEED_SPAN)
        try:
            final = canonicalize(tree.final)
            conf = gen_conformer(final, conformer_seed)
            graph = extract_pharmacophores(conf)
        except (EmbedFailure, EmptyPharmacophore, SanitizeError):
            continue
        produced += 1
        yield TrainingTriple(graph, tree, conformer_seed)


def write_triples(triples, path: str | Path) -> int:
    count = 0
    with open(path, "w") as fh:
        for t in triples:
            fh.write(json.dumps(t.to_json(), separators=(",", ":"), sort_keys=True))
            fh.write("\n")
            count += 1
    return count


def read_triples(path: str | Path) -> list[TrainingTriple]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(TrainingTriple.from_json(json.loads(line)))
    return out
