"""Building-block catalogs and reaction-template files."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from ..chem.api import Molecule, canonicalize, morgan_fp
from ..chem.fingerprint import BitFingerprint
from ..chem.mol import ParseError
from ..errors import DuplicateEntry, EmptyCatalog, UnknownBlock
from .reaction import ReactionTemplate

FP_RADIUS = 3
FP_NBITS = 4096


@dataclass(frozen=True)
class BuildingBlock:
    id: int
    mol: Molecule
    fp: BitFingerprint


class Catalog:
    """Immutable indexed collection of building blocks."""

    def __init__(self, blocks: list[BuildingBlock]):
        if not blocks:
            raise EmptyCatalog("catalog has no entries")
        self.blocks = blocks
        self.by_id = {b.id: b for b in blocks}
        self.by_smiles = {b.mol.smiles: b for b in blocks}

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def get(self, block_id: int) -> BuildingBlock:
        if block_id not in self.by_id:
            raise UnknownBlock(f"building block {block_id} not in catalog")
        return self.by_id[block_id]

    def digest(self) -> str:
        """Content hash binding a trained retrieval index to this catalog."""
        body = "\n".join(f"{b.id}\t{b.mol.smiles}" for b in sorted(self.blocks, key=lambda b: b.id))
        return hashlib.sha256(body.encode()).hexdigest()


def load_catalog(path: str | Path) -> Catalog:
    """Read a TSV of "id<TAB>SMILES" into a fingerprinted catalog."""
    blocks: list[BuildingBlock] = []
    seen_ids: set[int] = set()
    seen_smiles: dict[str, int] = {}
    lines = Path(path).read_text().splitlines()
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"{path}:{ln}: expected 'id<TAB>SMILES', got {raw!r}")
        try:
            block_id = int(parts[0])
        except ValueError:
            raise ParseError(f"{path}:{ln}: bad id {parts[0]!r}") from None
        if block_id in seen_ids:
            raise DuplicateEntry(f"{path}:{ln}: duplicate id {block_id}")
        seen_ids.add(block_id)
        try:
            mol = canonicalize(parts[1])
        except (ParseError, ValueError) as e:
            raise ParseError(f"{path}:{ln}: {e}") from None
        if mol.smiles in seen_smiles:
            raise DuplicateEntry(
                f"{path}:{ln}: duplicate molecule {mol.smiles} "
                f"(first seen line {seen_smiles[mol.smiles]})"
            )
        seen_smiles[mol.smiles] = ln
        blocks.append(BuildingBlock(block_id, mol, morgan_fp(mol, FP_RADIUS, FP_NBITS)))
    if not blocks:
        raise EmptyCatalog(f"{path}: no entries")
    return Catalog(blocks)


def load_templates(path: str | Path) -> list[ReactionTemplate]:
    """Read "id<TAB>arity<TAB>reaction-SMARTS" lines into templates."""
    templates: list[ReactionTemplate] = []
    seen: set[int] = set()
    lines = Path(path).read_text().splitlines()
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{path}:{ln}: expected 'id<TAB>arity<TAB>SMARTS', got {raw!r}")
        try:
            tid = int(parts[0])
            arity = int(parts[1])
        except ValueError:
            raise ParseError(f"{path}:{ln}: bad id/arity") from None
        if arity not in (1, 2):
            raise ParseError(f"{path}:{ln}: arity must be 1 or 2, got {arity}")
        if tid in seen:
            raise DuplicateEntry(f"{path}:{ln}: duplicate template id {tid}")
        seen.add(tid)
        try:
            templates.append(ReactionTemplate.parse(tid, arity, parts[2]))
        except ParseError as e:
            raise ParseError(f"{path}:{ln}: {e}") from None
    if not templates:
        raise EmptyCatalog(f"{path}: no templates")
    return templates
