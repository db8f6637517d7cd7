"""Pharmacophore feature typing over 3D conformers.

Six feature classes: hydrogen-bond donors and acceptors, aromatic rings,
hydrophobes, and positive/negative ionizable groups. An atom carrying
several features yields one point per feature at the same coordinates;
aromatic features sit at ring centroids. Atoms with no features are
dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyPharmacophore
from .mol import MolGraph

FEATURE_CLASSES = ("HBD", "HBA", "AR", "HC", "PIF", "NIF")
FEATURE_INDEX = {name: i for i, name in enumerate(FEATURE_CLASSES)}


@dataclass(frozen=True)
class PharmacophorePoint:
    feature: str
    xyz: tuple[float, float, float]


def _is_carbonyl_neighbor(g: MolGraph, idx: int) -> bool:
    """True when the atom is bonded to a carbon that carries C=O or C=S."""
    for nb in g.neighbors(idx):
        a = g.atoms[nb]
        if a.symbol != "C":
            continue
        for b in g.bonds_of(nb):
            other = g.atoms[b.other(nb)]
            if b.order == 2 and other.symbol in ("O", "S"):
                return True
    return False


def _acid_oxygen(g: MolGraph, idx: int) -> bool:
    """O-H oxygen of a carboxylic/sulfonic/phosphonic acid group."""
    a = g.atoms[idx]
    if a.symbol != "O" or a.n_h < 1:
        return False
    for nb in g.neighbors(idx):
        center = g.atoms[nb]
        if center.symbol in ("C", "S", "P"):
            for b in g.bonds_of(nb):
                if b.order == 2 and g.atoms[b.other(nb)].symbol == "O":
                    return True
    return False


def _basic_amine(g: MolGraph, idx: int) -> bool:
    a = g.atoms[idx]
    if a.symbol != "N" or a.aromatic:
        return False
    if any(b.order >= 2 for b in g.bonds_of(idx)):
        return False
    if _is_carbonyl_neighbor(g, idx):
        return False  # amide
    if any(g.atoms[nb].aromatic for nb in g.neighbors(idx)):
        return False  # aniline-type
    return True


def assign_features(g: MolGraph) -> list[tuple[str, list[int]]]:
    """(feature class, atom indices) pairs; multi-atom lists are centroids."""
    feats: list[tuple[str, list[int]]] = []
    for idx, a in enumerate(g.atoms):
        if a.symbol in ("N", "O") and a.n_h >= 1:
            feats.append(("HBD", [idx]))
        if a.symbol == "O":
            feats.append(("HBA", [idx]))
        elif a.symbol == "N":
            pyrrole_type = a.aromatic and a.n_h >= 1
            if not pyrrole_type and not _is_carbonyl_neighbor(g, idx) and a.charge <= 0:
                feats.append(("HBA", [idx]))
        if (
            a.symbol == "C"
            and not a.aromatic
            and g.degree(idx) >= 1
            and all(g.atoms[nb].symbol == "C" for nb in g.neighbors(idx))
        ):
            feats.append(("HC", [idx]))
        if a.charge > 0 or _basic_amine(g, idx):
            feats.append(("PIF", [idx]))
        if a.charge < 0 or _acid_oxygen(g, idx):
            feats.append(("NIF", [idx]))
    for ring in g.aromatic_rings():
        feats.append(("AR", sorted(ring)))
    return feats


def extract_points(g: MolGraph, coords: np.ndarray) -> list[PharmacophorePoint]:
    """Feature points with coordinates taken (or averaged) from `coords`."""
    feats = assign_features(g)
    if not feats:
        raise EmptyPharmacophore("no pharmacophore features found")
    points = []
    for feature, atom_ids in feats:
        xyz = coords[atom_ids].mean(axis=0)
        points.append(PharmacophorePoint(feature, (float(xyz[0]), float(xyz[1]), float(xyz[2]))))
    return points
