"""Reaction templates: SMARTS-based molecular transformations.

A template is "reactant1[.reactant2]>>product" with atom maps linking
reactant pattern atoms to product atoms. Application semantics: mapped
reactant atoms are rewired according to the product side, matched-but-
unmapped reactant atoms are deleted (leaving groups), unmatched atoms are
carried over untouched, and unmapped product atoms are created fresh.
Among all embedding combinations the product with the lexicographically
smallest canonical SMILES wins, which makes application deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..chem.mol import Atom, MolGraph, ParseError, SanitizeError, canonical_smiles, parse_smiles
from ..chem.api import Molecule
from ..chem.smarts import Pattern, find_matches, parse_smarts
from ..errors import ArityMismatch, NoProduct

_MATCH_LIMIT = 16   # embeddings kept per reactant pattern
_COMBO_LIMIT = 64   # embedding combinations tried per application


@dataclass
class ReactionTemplate:
    id: int
    arity: int
    smarts: str
    reactant_patterns: list[Pattern] = field(repr=False)
    product_graph: MolGraph = field(repr=False)

    @classmethod
    def parse(cls, template_id: int, arity: int, smarts: str) -> "ReactionTemplate":
        if ">>" not in smarts:
            raise ParseError(f"reaction SMARTS needs '>>': {smarts!r}")
        left, right = smarts.split(">>", 1)
        sides = left.split(".")
        if len(sides) != arity:
            raise ParseError(
                f"template {template_id}: {len(sides)} reactant patterns, arity {arity}"
            )
        patterns = [parse_smarts(s) for s in sides]
        product = parse_smiles(right, sanitize=False)
        product_maps = {a.map_num for a in product.atoms if a.map_num}
        for pat in patterns:
            for pa in pat.atoms:
                if pa.map_num and pa.map_num in product_maps:
                    product_maps.discard(pa.map_num)
        if product_maps:
            raise ParseError(
                f"template {template_id}: product maps {sorted(product_maps)} "
                "missing on the reactant side"
            )
        return cls(template_id, arity, smarts, patterns, product)


def applicable(template: ReactionTemplate, reactants: tuple[Molecule, ...]) -> bool:
    """True iff every reactant matches its pattern, in the given order."""
    if len(reactants) != template.arity:
        raise ArityMismatch(
            f"template {template.id} takes {template.arity} reactants, got {len(reactants)}"
        )
    for pat, mol in zip(template.reactant_patterns, reactants):
        if not find_matches(pat, mol.graph, limit=1):
            return False
    return True


def apply_reaction(template: ReactionTemplate, reactants: tuple[Molecule, ...]) -> Molecule:
    """Run the transform; deterministic smallest-canonical-SMILES product."""
    if len(reactants) != template.arity:
        raise ArityMismatch(
            f"template {template.id} takes {template.arity} reactants, got {len(reactants)}"
        )
    per_reactant = []
    for pat, mol in zip(template.reactant_patterns, reactants):
        matches = find_matches(pat, mol.graph, limit=_MATCH_LIMIT)
        if not matches:
            raise NoProduct(f"template {template.id}: reactant pattern unmatched")
        per_reactant.append(matches)

    candidates: list[str] = []
    for combo in itertools.islice(itertools.product(*per_reactant), _COMBO_LIMIT):
        try:
            g = _assemble(template, [m.graph for m in reactants], list(combo))
            g.sanitize()
            candidates.append(canonical_smiles(g))
        except SanitizeError:
            continue
    if not candidates:
        raise NoProduct(f"template {template.id}: no sanitizable product")
    best = min(candidates)
    return Molecule(best, parse_smiles(best))


def _assemble(
    template: ReactionTemplate,
    graphs: list[MolGraph],
    combo: list[tuple[int, ...]],
) -> MolGraph:
    """Build the raw product graph for one embedding combination."""
    offsets = []
    total = 0
    for g in graphs:
        offsets.append(total)
        total += len(g.atoms)

    # global ids of matched atoms; map number -> global source atom
    matched: set[int] = set()
    map_src: dict[int, int] = {}
    product_maps = {a.map_num for a in template.product_graph.atoms if a.map_num}
    deleted: set[int] = set()
    for r, (pat, match) in enumerate(zip(template.reactant_patterns, combo)):
        for p_idx, g_idx in enumerate(match):
            gid = g_idx + offsets[r]
            matched.add(gid)
            m = pat.atoms[p_idx].map_num
            if m and m in product_maps:
                map_src[m] = gid
            else:
                deleted.add(gid)

    out = MolGraph()
    new_id: dict[int, int] = {}  # global source id -> product graph id
    for r, g in enumerate(graphs):
        for idx, a in enumerate(g.atoms):
            gid = idx + offsets[r]
            if gid in deleted:
                continue
            new_id[gid] = out.add_atom(
                Atom(a.symbol, a.aromatic, a.charge, a.n_h, a.explicit_h, 0)
            )

    # product-template atoms: mapped ones resolve to sources, others are new
    tmpl_id: dict[int, int] = {}  # template atom idx -> product graph id
    for t_idx, ta in enumerate(template.product_graph.atoms):
        if ta.map_num and ta.map_num in map_src:
            tmpl_id[t_idx] = new_id[map_src[ta.map_num]]
        else:
            tmpl_id[t_idx] = out.add_atom(Atom(ta.symbol, ta.aromatic, ta.charge, 0, False, 0))

    # original bonds carry over unless both ends are product-mapped (the
    # template then owns that pair) or an end was deleted
    mapped_out = {new_id[g] for g in map_src.values()}
    for r, g in enumerate(graphs):
        for b in g.bonds:
            g1, g2 = b.a1 + offsets[r], b.a2 + offsets[r]
            if g1 in deleted or g2 in deleted:
                continue
            n1, n2 = new_id[g1], new_id[g2]
            if n1 in mapped_out and n2 in mapped_out:
                continue
            out.add_bond(n1, n2, b.order, b.aromatic)

    for tb in template.product_graph.bonds:
        n1, n2 = tmpl_id[tb.a1], tmpl_id[tb.a2]
        if out.find_bond(n1, n2) is None:
            out.add_bond(n1, n2, tb.order, tb.aromatic)

    # hydrogen policy: product-template atoms refill by valence; carried
    # atoms keep their counts unless a neighbor vanished
    for t_idx in tmpl_id.values():
        out.atoms[t_idx].explicit_h = False
        out.atoms[t_idx].n_h = 0
    for r, g in enumerate(graphs):
        for idx in range(len(g.atoms)):
            gid = idx + offsets[r]
            if gid in deleted or new_id[gid] in mapped_out:
                continue
            a_out = out.atoms[new_id[gid]]
            if out.degree(new_id[gid]) == g.degree(idx):
                a_out.explicit_h = True
            else:
                a_out.explicit_h = False
                a_out.n_h = 0
    return out
