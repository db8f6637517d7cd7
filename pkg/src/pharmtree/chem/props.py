"""Molecular descriptors: weight, logP, TPSA, counts and drug-likeness.

LogP is a coarse additive atom-contribution model and TPSA an Ertl-style
fragment sum; both are deterministic and monotone in the expected
directions (more carbon -> higher logP, more polar N/O -> higher TPSA).
The drug-likeness score combines eight desirability curves with the
published asymmetric double-sigmoid parameters and weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .elements import ATOMIC_MASS
from .mol import MolGraph

# additive logP contributions per heavy atom: (symbol, aromatic) -> value
_LOGP_ATOM = {
    ("C", False): 0.1441,
    ("C", True): 0.2955,
    ("N", False): -0.6000,
    ("N", True): -0.2600,
    ("O", False): -0.4000,
    ("O", True): -0.1000,
    ("S", False): 0.4000,
    ("S", True): 0.4400,
    ("P", False): -0.2000,
    ("B", False): 0.1500,
    ("B", True): 0.1500,
    ("F", False): 0.4202,
    ("Cl", False): 0.6895,
    ("Br", False): 0.8456,
    ("I", False): 0.8857,
}
_LOGP_H_ON_C = 0.1230
_LOGP_H_ON_HET = -0.2677
_LOGP_CHARGE = -1.0000


def mol_weight(g: MolGraph) -> float:
    total = 0.0
    for a in g.atoms:
        total += ATOMIC_MASS[a.symbol] + a.n_h * ATOMIC_MASS["H"]
    return total


def logp(g: MolGraph) -> float:
    total = 0.0
    for a in g.atoms:
        key = (a.symbol, a.aromatic)
        if key not in _LOGP_ATOM:
            key = (a.symbol, False)
        total += _LOGP_ATOM.get(key, 0.0)
        if a.symbol == "C":
            total += a.n_h * _LOGP_H_ON_C
        else:
            total += a.n_h * _LOGP_H_ON_HET
        total += abs(a.charge) * _LOGP_CHARGE
    return total


def tpsa(g: MolGraph) -> float:
    """Topological polar surface area from N/O/S/P fragment contributions."""
    total = 0.0
    for idx, a in enumerate(g.atoms):
        deg = g.degree(idx)
        orders = sorted(b.order for b in g.bonds_of(idx) if not b.aromatic)
        n_double = orders.count(2)
        n_triple = orders.count(3)
        h = a.n_h
        if a.symbol == "N":
            if a.charge == 0:
                if a.aromatic:
                    if h >= 1:
                        total += 15.79
                    elif deg == 3:
                        total += 4.93
                    else:
                        total += 12.89
                elif n_triple:
                    total += 23.79
                elif n_double:
                    total += 23.85 if h >= 1 else 12.36
                elif h >= 2:
                    total += 26.02
                elif h == 1:
                    total += 12.03
                else:
                    total += 3.24
            elif a.charge == 1:
                if a.aromatic:
                    total += 14.14 if h >= 1 else 4.10
                elif h >= 3:
                    total += 27.64
                elif h == 2:
                    total += 16.61
                elif h == 1:
                    total += 4.44
                else:
                    total += 0.00
        elif a.symbol == "O":
            if a.charge == -1:
                total += 23.06
            elif a.aromatic:
                total += 13.14
            elif n_double:
                total += 17.07
            elif h >= 1:
                total += 20.23
            else:
                total += 9.23
        elif a.symbol == "S":
            if a.aromatic:
                total += 28.24
            elif n_double:
                total += 32.09
            elif h >= 1:
                total += 38.80
            else:
                total += 25.30
        elif a.symbol == "P":
            total += 13.59 if n_double else 9.81
    return total


def h_bond_donors(g: MolGraph) -> int:
    return sum(1 for a in g.atoms if a.symbol in ("N", "O") and a.n_h >= 1)


def h_bond_acceptors(g: MolGraph) -> int:
    return sum(1 for a in g.atoms if a.symbol in ("N", "O"))


def rotatable_bonds(g: MolGraph) -> int:
    """Non-ring single bonds between two non-terminal, non-sp atoms."""
    ring_bonds = g.ring_bond_indices()
    count = 0
    for bidx, b in enumerate(g.bonds):
        if b.order != 1 or b.aromatic or bidx in ring_bonds:
            continue
        if g.degree(b.a1) < 2 or g.degree(b.a2) < 2:
            continue
        if any(x.order == 3 for x in g.bonds_of(b.a1)):
            continue
        if any(x.order == 3 for x in g.bonds_of(b.a2)):
            continue
        count += 1
    return count


def aromatic_ring_count(g: MolGraph) -> int:
    return len(g.aromatic_rings())


# desirability curves: property -> (a, b, c, d, e, f, dmax)
_ADS_PARAMS = {
    "MW": (2.817065973, 392.5754953, 290.7489764, 2.419764353, 49.22325677, 65.37051707, 104.9805561),
    "ALOGP": (3.172690585, 137.8624751, 2.534937431, 4.581497897, 0.822739154, 0.576295591, 131.3186604),
    "HBA": (2.948620388, 160.4605972, 3.615294657, 4.435986202, 0.290141953, 1.300669958, 148.7763046),
    "HBD": (1.618662227, 1010.051101, 0.985094388, 0.000000001, 0.713820843, 0.920922555, 258.1632616),
    "PSA": (1.876861559, 125.2232657, 62.90773554, 87.83366614, 12.01999824, 28.51324732, 104.5686167),
    "ROTB": (0.010000000, 272.4121427, 2.558379970, 1.565547684, 1.271567166, 2.758063707, 105.4420403),
    "AROM": (3.217788970, 957.7374108, 2.274627939, 0.000000001, 1.317690384, 0.375760881, 312.3372610),
    "ALERTS": (0.010000000, 1199.094025, -0.09002883, 0.000000001, 0.185904477, 0.875193782, 417.7253140),
}

_QED_WEIGHTS = {
    "MW": 0.66, "ALOGP": 0.46, "HBA": 0.05, "HBD": 0.61,
    "PSA": 0.06, "ROTB": 0.65, "AROM": 0.48, "ALERTS": 0.95,
}


def _ads(x: float, p: tuple) -> float:
    a, b, c, d, e, f, dmax = p
    v = a + b / (1 + math.exp(-(x - c + d / 2) / e)) * (
        1 - 1 / (1 + math.exp(-(x - c - d / 2) / f))
    )
    return v / dmax


def qed(g: MolGraph) -> float:
    """Weighted drug-likeness in [0, 1] from eight desirability curves."""
    values = {
        "MW": mol_weight(g),
        "ALOGP": logp(g),
        "HBA": float(h_bond_acceptors(g)),
        "HBD": float(h_bond_donors(g)),
        "PSA": tpsa(g),
        "ROTB": float(rotatable_bonds(g)),
        "AROM": float(aromatic_ring_count(g)),
        "ALERTS": 0.0,
    }
    num = 0.0
    den = 0.0
    for key, w in _QED_WEIGHTS.items():
        d = min(max(_ads(values[key], _ADS_PARAMS[key]), 1e-6), 1.0)
        num += w * math.log(d)
        den += w
    return math.exp(num / den)


@dataclass(frozen=True)
class PropertyRecord:
    mw: float
    logp: float
    tpsa: float
    hbd: int
    hba: int
    rotatable: int
    aromatic_rings: int
    qed: float


def properties(g: MolGraph) -> PropertyRecord:
    return PropertyRecord(
        mw=mol_weight(g),
        logp=logp(g),
        tpsa=tpsa(g),
        hbd=h_bond_donors(g),
        hba=h_bond_acceptors(g),
        rotatable=rotatable_bonds(g),
        aromatic_rings=aromatic_ring_count(g),
        qed=qed(g),
    )
