"""Self-contained chemistry kernel: graphs, SMILES, SMARTS, descriptors."""

from .api import (
    BitFingerprint,
    Conformer,
    FEATURE_CLASSES,
    FEATURE_INDEX,
    Molecule,
    PharmacophoreGraph,
    PharmacophorePoint,
    PropertyRecord,
    canonicalize,
    extract_pharmacophores,
    gen_conformer,
    morgan_fp,
    murcko_scaffold,
    properties,
    tanimoto,
)
from .mol import Atom, Bond, MolGraph, ParseError, SanitizeError, canonical_smiles, parse_smiles

__all__ = [
    "Atom",
    "Bond",
    "MolGraph",
    "ParseError",
    "SanitizeError",
    "canonical_smiles",
    "parse_smiles",
    "Molecule",
    "PharmacophoreGraph",
    "PharmacophorePoint",
    "BitFingerprint",
    "Conformer",
    "PropertyRecord",
    "FEATURE_CLASSES",
    "FEATURE_INDEX",
    "canonicalize",
    "morgan_fp",
    "tanimoto",
    "murcko_scaffold",
    "gen_conformer",
    "extract_pharmacophores",
    "properties",
]
