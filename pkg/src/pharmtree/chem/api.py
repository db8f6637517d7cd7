"""Public chemistry operations used by the rest of the package.

Everything downstream goes through these functions; the graph/SMILES
machinery underneath is an implementation detail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformer import Conformer, embed_coords
from .fingerprint import BitFingerprint, morgan_fp as _morgan_graph, tanimoto
from .mol import MolGraph, canonical_smiles, parse_smiles
from .pharmacophore import (
    FEATURE_CLASSES,
    FEATURE_INDEX,
    PharmacophorePoint,
    extract_points,
)
from .props import PropertyRecord, properties as _properties_graph
from .scaffold import murcko_scaffold_graph

__all__ = [
    "Molecule",
    "PharmacophoreGraph",
    "canonicalize",
    "morgan_fp",
    "tanimoto",
    "murcko_scaffold",
    "gen_conformer",
    "extract_pharmacophores",
    "properties",
    "BitFingerprint",
    "Conformer",
    "PharmacophorePoint",
    "PropertyRecord",
    "FEATURE_CLASSES",
    "FEATURE_INDEX",
]


@dataclass(frozen=True)
class Molecule:
    """A sanitized molecule: canonical SMILES plus its parsed graph."""

    smiles: str
    graph: MolGraph

    def __eq__(self, other) -> bool:
        return isinstance(other, Molecule) and self.smiles == other.smiles

    def __hash__(self) -> int:
        return hash(self.smiles)


def canonicalize(smiles: str) -> Molecule:
    """Parse, sanitize and return the molecule in canonical form."""
    g = parse_smiles(smiles)
    return Molecule(canonical_smiles(g), g)


def morgan_fp(mol: Molecule, radius: int = 3, nbits: int = 4096) -> BitFingerprint:
    return _morgan_graph(mol.graph, radius=radius, nbits=nbits)


def murcko_scaffold(mol: Molecule) -> Molecule:
    """Ring-and-linker scaffold; acyclic molecules give the empty scaffold.

    The empty scaffold is Molecule("", empty graph): it fingerprints to the
    all-zero vector and compares equal only to itself.
    """
    sub = murcko_scaffold_graph(mol.graph)
    if sub is None:
        return Molecule("", MolGraph())
    return Molecule(canonical_smiles(sub), sub)


def gen_conformer(mol: Molecule, seed: int) -> Conformer:
    coords = embed_coords(mol.graph, seed)
    return Conformer(coords, mol.smiles, seed)


@dataclass(frozen=True)
class PharmacophoreGraph:
    """Point set consumed by the encoder: one-hot features + 3D coordinates."""

    features: np.ndarray  # (n, 6) float32 one-hot rows
    coords: np.ndarray    # (n, 3) float64

    @classmethod
    def from_points(cls, points: list[PharmacophorePoint]) -> "PharmacophoreGraph":
        n = len(points)
        feats = np.zeros((n, len(FEATURE_CLASSES)), dtype=np.float32)
        coords = np.zeros((n, 3))
        for i, p in enumerate(points):
            feats[i, FEATURE_INDEX[p.feature]] = 1.0
            coords[i] = p.xyz
        return cls(feats, coords)

    @property
    def n_points(self) -> int:
        return self.features.shape[0]

    def to_points(self) -> list[PharmacophorePoint]:
        out = []
        for i in range(self.n_points):
            cls_idx = int(np.argmax(self.features[i]))
            xyz = self.coords[i]
            out.append(
                PharmacophorePoint(
                    FEATURE_CLASSES[cls_idx],
                    (float(xyz[0]), float(xyz[1]), float(xyz[2])),
                )
            )
        return out


def extract_pharmacophores(conf: Conformer) -> PharmacophoreGraph:
    g = parse_smiles(conf.smiles)
    points = extract_points(g, conf.coords)
    return PharmacophoreGraph.from_points(points)


def properties(mol: Molecule) -> PropertyRecord:
    return _properties_graph(mol.graph)
