"""Building blocks, reaction templates, and synthetic-tree machinery."""

from .catalog import BuildingBlock, Catalog, load_catalog, load_templates
from .reaction import ReactionTemplate, applicable, apply_reaction
from .tree import SyntheticTree, TreeStep, replay, sample_tree
from .dataset import TrainingTriple, make_dataset, read_triples, write_triples

__all__ = [
    "BuildingBlock",
    "Catalog",
    "load_catalog",
    "load_templates",
    "ReactionTemplate",
    "applicable",
    "apply_reaction",
    "SyntheticTree",
    "TreeStep",
    "replay",
    "sample_tree",
    "TrainingTriple",
    "make_dataset",
    "read_triples",
    "write_triples",
]
