"""Element tables used across the chemistry kernel.

Covers the organic subset this package generates and consumes; anything
outside it is rejected at parse time.
"""

from __future__ import annotations

# symbol -> atomic number
ATOMIC_NUM = {
    "H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9,
    "P": 15, "S": 16, "Cl": 17, "Br": 35, "I": 53,
}

NUM_TO_SYMBOL = {v: k for k, v in ATOMIC_NUM.items()}

# standard atomic weights, g/mol
ATOMIC_MASS = {
    "H": 1.008, "B": 10.811, "C": 12.011, "N": 14.007, "O": 15.999,
    "F": 18.998, "P": 30.974, "S": 32.06, "Cl": 35.45, "Br": 79.904,
    "I": 126.904,
}

# normal valences in increasing order (Daylight organic-subset rules)
DEFAULT_VALENCES = {
    "B": (3,), "C": (4,), "N": (3, 5), "O": (2,), "F": (1,),
    "P": (3, 5), "S": (2, 4, 6), "Cl": (1,), "Br": (1,), "I": (1,),
    "H": (1,),
}

# elements that may be written bare (no brackets) in SMILES
ORGANIC_SUBSET = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}

# elements that may carry the aromatic (lowercase) flag
AROMATIC_OK = {"B", "C", "N", "O", "P", "S"}

# single-bond covalent radii, angstrom (fallback for bond-length targets)
COVALENT_RADIUS = {
    "H": 0.31, "B": 0.84, "C": 0.76, "N": 0.71, "O": 0.66, "F": 0.57,
    "P": 1.07, "S": 1.05, "Cl": 1.02, "Br": 1.20, "I": 1.39,
}


def default_valence(symbol: str, bond_sum: int) -> int:
    """Smallest normal valence >= bond_sum, or bond_sum itself if none fits."""
    for v in DEFAULT_VALENCES.get(symbol, ()):
        if v >= bond_sum:
            return v
    return bond_sum
