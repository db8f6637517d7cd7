"""Ring-and-linker scaffolds (Bemis-Murcko style)."""

from __future__ import annotations

from .mol import MolGraph, canonical_smiles


def murcko_scaffold_graph(g: MolGraph) -> MolGraph | None:
    """Ring systems plus linkers; None when the molecule has no rings.

    Side chains are pruned by repeatedly deleting degree-1 atoms; atoms
    attached to the remaining frame by a double or triple bond (exocyclic
    carbonyls and the like) are restored afterwards.
    """
    if not g.ring_bond_indices():
        return None
    alive = set(range(len(g.atoms)))
    while True:
        removable = [
            i for i in alive
            if sum(1 for nb in g.neighbors(i) if nb in alive) <= 1
        ]
        ring_atoms = {i for i in removable if g.is_ring_atom(i)}
        removable = [i for i in removable if i not in ring_atoms]
        if not removable:
            break
        alive -= set(removable)
    restored = set()
    for b in g.bonds:
        if b.order >= 2 and not b.aromatic:
            if b.a1 in alive and b.a2 not in alive:
                restored.add(b.a2)
            elif b.a2 in alive and b.a1 not in alive:
                restored.add(b.a1)
    alive |= restored
    keep = sorted(alive)
    sub = g.subgraph(keep)
    # Atoms that lost neighbors need new hydrogen counts. Aromatic atoms get
    # them pinned explicitly (bare aromatic N means zero H by convention, so
    # a demethylated pyrrole N must come out as [nH]); aliphatic atoms are
    # refilled by valence. Unchanged atoms keep their spec.
    for new_idx, old_idx in enumerate(keep):
        lost = g.degree(old_idx) - sub.degree(new_idx)
        if lost <= 0:
            continue
        a = sub.atoms[new_idx]
        if a.aromatic:
            a.explicit_h = True
            a.n_h = a.n_h + lost
        else:
            a.explicit_h = False
            a.n_h = 0
    sub.sanitize()
    return sub


def murcko_scaffold(g: MolGraph) -> str:
    """Canonical SMILES of the scaffold; empty string for acyclic molecules."""
    sub = murcko_scaffold_graph(g)
    if sub is None:
        return ""
    return canonical_smiles(sub)
