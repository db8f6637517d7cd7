"""Molecular graphs: SMILES parsing, sanitization, and canonical output.

The graph model is intentionally small: atoms carry element/aromatic/charge
and a *total* hydrogen count; bonds carry a kekule order plus an aromatic
flag. Stereochemistry is parsed and discarded. Aromatic systems must
kekulize (perfect matching of double bonds) or the molecule is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .elements import (
    AROMATIC_OK,
    ATOMIC_NUM,
    DEFAULT_VALENCES,
    ORGANIC_SUBSET,
    default_valence,
)


from ..errors import ParseError, SanitizeError

AROMATIC_SYMBOLS = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
TWO_LETTER = ("Cl", "Br")


@dataclass
class Atom:
    symbol: str
    aromatic: bool = False
    charge: int = 0
    n_h: int = 0            # total hydrogens (all H are implicit in the graph)
    explicit_h: bool = False  # True when the H count came from a bracket token
    map_num: int = 0


@dataclass
class Bond:
    a1: int
    a2: int
    order: int = 1          # kekule order: 1, 2 or 3
    aromatic: bool = False

    def other(self, idx: int) -> int:
        return self.a2 if idx == self.a1 else self.a1


def allowed_valences(symbol: str, charge: int) -> tuple[int, ...]:
    if charge == 0:
        return DEFAULT_VALENCES.get(symbol, ())
    table = {
        ("N", 1): (4,), ("N", -1): (2,),
        ("O", 1): (3,), ("O", -1): (1,),
        ("C", 1): (3,), ("C", -1): (3,),
        ("S", 1): (3, 5), ("S", -1): (1,),
        ("P", 1): (4,), ("B", -1): (4,),
        ("F", -1): (0,), ("Cl", -1): (0,), ("Br", -1): (0,), ("I", -1): (0,),
    }
    return table.get((symbol, charge), ())


class MolGraph:
    """Mutable molecular graph. Call sanitize() after construction/edits."""

    def __init__(self) -> None:
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self._adj: dict[int, list[int]] = {}   # atom idx -> bond indices
        self._rings: list[list[int]] | None = None
        self._ring_bonds: set[int] | None = None

    # -- construction -----------------------------------------------------

    def _dirty(self) -> None:
        self._rings = None
        self._ring_bonds = None

    def add_atom(self, atom: Atom) -> int:
        idx = len(self.atoms)
        self.atoms.append(atom)
        self._adj[idx] = []
        self._dirty()
        return idx

    def add_bond(self, a1: int, a2: int, order: int = 1, aromatic: bool = False) -> None:
        if a1 == a2:
            raise SanitizeError("self bond")
        if self.find_bond(a1, a2) is not None:
            raise SanitizeError(f"duplicate bond {a1}-{a2}")
        bidx = len(self.bonds)
        self.bonds.append(Bond(a1, a2, order, aromatic))
        self._adj[a1].append(bidx)
        self._adj[a2].append(bidx)
        self._dirty()

    def find_bond(self, a1: int, a2: int) -> Bond | None:
        for bidx in self._adj.get(a1, ()):
            b = self.bonds[bidx]
            if b.other(a1) == a2:
                return b
        return None

    def neighbors(self, idx: int) -> list[int]:
        return [self.bonds[b].other(idx) for b in self._adj[idx]]

    def bonds_of(self, idx: int) -> list[Bond]:
        return [self.bonds[b] for b in self._adj[idx]]

    def degree(self, idx: int) -> int:
        return len(self._adj[idx])

    def bond_order_sum(self, idx: int) -> int:
        return sum(b.order for b in self.bonds_of(idx))

    def n_atoms(self) -> int:
        return len(self.atoms)

    def copy(self) -> "MolGraph":
        g = MolGraph()
        for a in self.atoms:
            g.add_atom(Atom(a.symbol, a.aromatic, a.charge, a.n_h, a.explicit_h, a.map_num))
        for b in self.bonds:
            g.add_bond(b.a1, b.a2, b.order, b.aromatic)
        return g

    def subgraph(self, keep: list[int]) -> "MolGraph":
        """Induced subgraph over `keep` (in the given order)."""
        remap = {old: new for new, old in enumerate(keep)}
        g = MolGraph()
        for old in keep:
            a = self.atoms[old]
            g.add_atom(Atom(a.symbol, a.aromatic, a.charge, a.n_h, a.explicit_h, a.map_num))
        for b in self.bonds:
            if b.a1 in remap and b.a2 in remap:
                g.add_bond(remap[b.a1], remap[b.a2], b.order, b.aromatic)
        return g

    def components(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for start in range(len(self.atoms)):
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            stack = [start]
            while stack:
                cur = stack.pop()
                for nb in self.neighbors(cur):
                    if nb not in seen:
                        seen.add(nb)
                        comp.append(nb)
                        stack.append(nb)
            out.append(comp)
        return out

    # -- ring perception ---------------------------------------------------

    def ring_bond_indices(self) -> set[int]:
        """Bond indices that lie on a cycle (non-bridges)."""
        if self._ring_bonds is not None:
            return self._ring_bonds
        n = len(self.atoms)
        disc = [-1] * n
        low = [0] * n
        bridges: set[int] = set()
        timer = 0
        for root in range(n):
            if disc[root] != -1:
                continue
            stack: list[tuple[int, int, int]] = [(root, -1, 0)]
            while stack:
                node, parent_bond, state = stack.pop()
                if state == 0:
                    if disc[node] != -1:
                        continue
                    disc[node] = low[node] = timer
                    timer += 1
                    stack.append((node, parent_bond, 1))
                    for bidx in self._adj[node]:
                        if bidx == parent_bond:
                            continue
                        nb = self.bonds[bidx].other(node)
                        if disc[nb] == -1:
                            stack.append((nb, bidx, 0))
                        else:
                            low[node] = min(low[node], disc[nb])
                else:
                    for bidx in self._adj[node]:
                        if bidx == parent_bond:
                            continue
                        nb = self.bonds[bidx].other(node)
                        if disc[nb] > disc[node]:  # tree child
                            low[node] = min(low[node], low[nb])
                            if low[nb] > disc[node]:
                                bridges.add(bidx)
                        elif bidx != parent_bond:
                            low[node] = min(low[node], disc[nb])
        self._ring_bonds = {i for i in range(len(self.bonds)) if i not in bridges}
        return self._ring_bonds

    def is_ring_atom(self, idx: int) -> bool:
        ring_bonds = self.ring_bond_indices()
        return any(b in ring_bonds for b in self._adj[idx])

    def is_ring_bond(self, a1: int, a2: int) -> bool:
        ring_bonds = self.ring_bond_indices()
        for bidx in self._adj[a1]:
            if self.bonds[bidx].other(a1) == a2:
                return bidx in ring_bonds
        return False

    def rings(self) -> list[list[int]]:
        """Small set of smallest rings covering every ring bond (SSSR-like)."""
        if self._rings is not None:
            return self._rings
        ring_bonds = self.ring_bond_indices()
        candidates: list[tuple[int, ...]] = []
        seen_rings: set[frozenset[int]] = set()
        for bidx in sorted(ring_bonds):
            cyc = self._shortest_cycle_through(bidx, ring_bonds)
            if cyc is not None:
                key = frozenset(cyc)
                if key not in seen_rings:
                    seen_rings.add(key)
                    candidates.append(tuple(cyc))
        candidates.sort(key=lambda c: (len(c), c))
        chosen: list[list[int]] = []
        covered: set[int] = set()
        for cyc in candidates:
            edges = set()
            m = len(cyc)
            for i in range(m):
                a, b = cyc[i], cyc[(i + 1) % m]
                for bidx in self._adj[a]:
                    if self.bonds[bidx].other(a) == b:
                        edges.add(bidx)
            if not edges <= covered:
                chosen.append(list(cyc))
                covered |= edges
        self._rings = chosen
        return chosen

    def _shortest_cycle_through(self, bidx: int, ring_bonds: set[int]) -> list[int] | None:
        """Shortest cycle containing bond `bidx`, using ring bonds only."""
        b = self.bonds[bidx]
        src, dst = b.a1, b.a2
        prev: dict[int, int] = {src: -1}
        queue = [src]
        while queue:
            nxt: list[int] = []
            for node in queue:
                for bi in self._adj[node]:
                    if bi == bidx or bi not in ring_bonds:
                        continue
                    nb = self.bonds[bi].other(node)
                    if nb not in prev:
                        prev[nb] = node
                        if nb == dst:
                            path = [nb]
                            while path[-1] != src:
                                path.append(prev[path[-1]])
                            return path
                        nxt.append(nb)
            queue = nxt
        return None

    def aromatic_rings(self) -> list[list[int]]:
        return [r for r in self.rings() if all(self.atoms[i].aromatic for i in r)]

    def ring_sizes_of(self, idx: int) -> list[int]:
        return [len(r) for r in self.rings() if idx in r]

    # -- sanitization ------------------------------------------------------

    def kekulize(self) -> None:
        """Assign orders 1/2 to aromatic bonds via perfect matching.

        Aromatic bonds not on any cycle are demoted to plain single bonds
        (covers bare bonds between aromatic systems, e.g. biphenyls).
        """
        ring_bonds = self.ring_bond_indices()
        changed = False
        for i, b in enumerate(self.bonds):
            if b.aromatic and i not in ring_bonds:
                b.aromatic = False
                b.order = 1
                changed = True
        if changed:
            self._dirty()
        arom_bidx = [i for i, b in enumerate(self.bonds) if b.aromatic]
        arom_atoms = sorted(
            {self.bonds[i].a1 for i in arom_bidx} | {self.bonds[i].a2 for i in arom_bidx}
        )
        for idx in arom_atoms:
            if not self.atoms[idx].aromatic:
                raise SanitizeError("aromatic bond to non-aromatic atom")
        in_system = set(arom_atoms)
        for idx, a in enumerate(self.atoms):
            if a.aromatic and idx not in in_system:
                raise SanitizeError("aromatic atom outside any aromatic ring")
        if not arom_bidx:
            return

        for i in arom_bidx:
            self.bonds[i].order = 1
        targets = [idx for idx in arom_atoms if self._needs_double(idx)]
        tset = set(targets)
        nbrs: dict[int, list[tuple[int, int]]] = {t: [] for t in targets}
        for bidx in arom_bidx:
            b = self.bonds[bidx]
            if b.a1 in tset and b.a2 in tset:
                nbrs[b.a1].append((b.a2, bidx))
                nbrs[b.a2].append((b.a1, bidx))
        matched: dict[int, int] = {}
        order = sorted(targets, key=lambda t: (len(nbrs[t]), t))

        def backtrack(pos: int) -> bool:
            while pos < len(order) and order[pos] in matched:
                pos += 1
            if pos == len(order):
                return True
            cur = order[pos]
            for other, bidx in nbrs[cur]:
                if other not in matched:
                    matched[cur] = bidx
                    matched[other] = bidx
                    if backtrack(pos + 1):
                        return True
                    del matched[cur]
                    del matched[other]
            return False

        if not backtrack(0):
            raise SanitizeError("aromatic system cannot be kekulized")
        for bidx in set(matched.values()):
            self.bonds[bidx].order = 2

    def _needs_double(self, idx: int) -> bool:
        a = self.atoms[idx]
        base = 0
        for b in self.bonds_of(idx):
            base += 1 if b.aromatic else b.order
        if a.explicit_h:
            base += a.n_h
        vals = allowed_valences(a.symbol, a.charge)
        if not vals:
            raise SanitizeError(f"no valence model for {a.symbol}{a.charge:+d}")
        fitting = [v for v in vals if v >= base]
        if not fitting:
            raise SanitizeError(f"valence overflow on aromatic atom {idx}")
        return fitting[0] - base >= 1

    def perceive_aromaticity(self) -> None:
        """Mark 5/6-membered rings with 6 pi electrons as aromatic.

        Works on kekule structures so that lowercase and uppercase spellings
        of the same ring canonicalize identically. Contribution rules: atom
        with an in-ring (or ring-atom-partner) double bond gives 1; C or S
        with an exocyclic double bond to an acyclic atom gives 0 (carbonyl
        style); lone-pair donors (N, O, S, C-) with no double bond give 2.
        """
        pre_flags = [a.aromatic for a in self.atoms]
        winners: list[list[int]] = []
        for ring in self.rings():
            if len(ring) not in (5, 6):
                continue
            if any(pre_flags[i] for i in ring):
                continue  # already aromatic (or mixed spelling), leave as written
            rset = set(ring)
            pi = 0
            ok = True
            for idx in ring:
                a = self.atoms[idx]
                if a.symbol not in AROMATIC_OK or self.degree(idx) > 3:
                    ok = False
                    break
                bonds = self.bonds_of(idx)
                if any(b.order == 3 for b in bonds):
                    ok = False
                    break
                doubles = [b for b in bonds if b.order == 2]
                if len(doubles) > 1:
                    ok = False
                    break
                if doubles:
                    partner = doubles[0].other(idx)
                    if partner in rset or self.is_ring_atom(partner):
                        pi += 1
                    elif a.symbol in ("C", "S"):
                        pi += 0
                    else:
                        ok = False
                        break
                else:
                    if a.symbol in ("N", "P"):
                        pi += 2
                    elif a.symbol in ("O", "S") and a.charge == 0:
                        pi += 2
                    elif a.symbol == "C" and a.charge == -1:
                        pi += 2
                    elif a.symbol == "C" and a.charge == 1:
                        pi += 0
                    elif a.symbol == "B" and a.charge == 0:
                        pi += 0
                    else:
                        ok = False
                        break
            if ok and pi == 6:
                winners.append(ring)
        for ring in winners:
            for idx in ring:
                self.atoms[idx].aromatic = True
            m = len(ring)
            for i in range(m):
                b = self.find_bond(ring[i], ring[(i + 1) % m])
                if b is not None:
                    b.aromatic = True

    def assign_implicit_h(self) -> None:
        """Fill hydrogen counts on atoms that did not specify them."""
        for idx, a in enumerate(self.atoms):
            if a.explicit_h:
                continue
            bsum = self.bond_order_sum(idx)
            vals = allowed_valences(a.symbol, a.charge)
            if not vals:
                raise SanitizeError(f"no valence model for {a.symbol}{a.charge:+d}")
            fitting = [v for v in vals if v >= bsum]
            a.n_h = (fitting[0] - bsum) if fitting else 0

    def check_valences(self) -> None:
        for idx, a in enumerate(self.atoms):
            total = self.bond_order_sum(idx) + a.n_h
            vals = allowed_valences(a.symbol, a.charge)
            if total not in vals:
                raise SanitizeError(
                    f"valence {total} not allowed for {a.symbol}{a.charge:+d} (atom {idx})"
                )

    def sanitize(self) -> None:
        self._dirty()
        self.kekulize()
        self.assign_implicit_h()
        self.perceive_aromaticity()
        self.check_valences()


# -- SMILES parsing ---------------------------------------------------------


def _parse_bracket(s: str, pos: int) -> tuple[Atom, int]:
    """Parse a bracket atom starting at s[pos] == '['; returns (atom, next_pos)."""
    end = s.find("]", pos)
    if end < 0:
        raise ParseError(f"unclosed bracket at {pos}")
    body = s[pos + 1:end]
    i = 0
    while i < len(body) and body[i].isdigit():  # isotope, accepted and dropped
        i += 1
    aromatic = False
    symbol = None
    for two in TWO_LETTER:
        if body[i:i + 2] == two:
            symbol = two
            i += 2
            break
    if symbol is None and i < len(body):
        ch = body[i]
        if ch.isupper():
            symbol = ch
            i += 1
        elif ch in AROMATIC_SYMBOLS:
            symbol = AROMATIC_SYMBOLS[ch]
            aromatic = True
            i += 1
    if symbol is None or symbol not in ATOMIC_NUM:
        raise ParseError(f"unknown element in bracket: [{body}]")
    while i < len(body) and body[i] == "@":  # chirality, dropped
        i += 1
    n_h = 0
    if i < len(body) and body[i] == "H":
        i += 1
        n_h = 1
        num = ""
        while i < len(body) and body[i].isdigit():
            num += body[i]
            i += 1
        if num:
            n_h = int(num)
    charge = 0
    if i < len(body) and body[i] in "+-":
        sign = 1 if body[i] == "+" else -1
        i += 1
        num = ""
        while i < len(body) and body[i].isdigit():
            num += body[i]
            i += 1
        if num:
            charge = sign * int(num)
        else:
            charge = sign
            while i < len(body) and body[i] in "+-":
                charge += sign
                i += 1
    map_num = 0
    if i < len(body) and body[i] == ":":
        i += 1
        num = ""
        while i < len(body) and body[i].isdigit():
            num += body[i]
            i += 1
        if not num:
            raise ParseError(f"bad atom map in [{body}]")
        map_num = int(num)
    if i != len(body):
        raise ParseError(f"trailing characters in bracket: [{body}]")
    return Atom(symbol, aromatic, charge, n_h, True, map_num), end + 1


def parse_smiles(s: str, sanitize: bool = True) -> MolGraph:
    """Parse a SMILES string into a MolGraph.

    Supports the organic subset, brackets (charge/H/map), aromatic lowercase
    forms, branches, ring closures (incl. %nn) and dot-separated fragments.
    Stereo markers are accepted and ignored.
    """
    if not s or not s.strip():
        raise ParseError("empty SMILES")
    s = s.strip()
    g = MolGraph()
    prev: int | None = None
    pending_bond: str | None = None
    stack: list[int] = []
    ring_map: dict[int, tuple[int, str | None]] = {}
    pos = 0

    def close_or_open_ring(num: int, cur: int, bond_sym: str | None) -> None:
        if num in ring_map:
            other, sym0 = ring_map.pop(num)
            sym = bond_sym or sym0
            if other == cur:
                raise ParseError(f"ring closure {num} to self")
            _add_parsed_bond(g, other, cur, sym)
        else:
            ring_map[num] = (cur, bond_sym)

    while pos < len(s):
        ch = s[pos]
        if ch == "[":
            atom, pos = _parse_bracket(s, pos)
            idx = g.add_atom(atom)
            if prev is not None:
                _add_parsed_bond(g, prev, idx, pending_bond)
            prev = idx
            pending_bond = None
        elif ch.isalpha():
            symbol = None
            aromatic = False
            for two in TWO_LETTER:
                if s[pos:pos + 2] == two:
                    symbol = two
                    pos += 2
                    break
            if symbol is None:
                if ch.isupper() and ch in ORGANIC_SUBSET:
                    symbol = ch
                elif ch in AROMATIC_SYMBOLS:
                    symbol = AROMATIC_SYMBOLS[ch]
                    aromatic = True
                else:
                    raise ParseError(f"unexpected symbol {ch!r} at {pos}")
                pos += 1
            idx = g.add_atom(Atom(symbol, aromatic))
            if prev is not None:
                _add_parsed_bond(g, prev, idx, pending_bond)
            prev = idx
            pending_bond = None
        elif ch in "-=#:/\\":
            if pending_bond is not None:
                raise ParseError(f"double bond symbol at {pos}")
            pending_bond = "-" if ch in "/\\" else ch
            pos += 1
        elif ch.isdigit():
            if prev is None:
                raise ParseError(f"ring closure before any atom at {pos}")
            close_or_open_ring(int(ch), prev, pending_bond)
            pending_bond = None
            pos += 1
        elif ch == "%":
            if prev is None or not s[pos + 1:pos + 3].isdigit():
                raise ParseError(f"bad %nn ring closure at {pos}")
            close_or_open_ring(int(s[pos + 1:pos + 3]), prev, pending_bond)
            pending_bond = None
            pos += 3
        elif ch == "(":
            if prev is None:
                raise ParseError("branch before any atom")
            stack.append(prev)
            pos += 1
        elif ch == ")":
            if not stack:
                raise ParseError(f"unbalanced ')' at {pos}")
            prev = stack.pop()
            pos += 1
        elif ch == ".":
            prev = None
            pending_bond = None
            pos += 1
        else:
            raise ParseError(f"unexpected character {ch!r} at {pos}")
    if stack:
        raise ParseError("unbalanced '(' in SMILES")
    if ring_map:
        raise ParseError(f"unclosed ring closures: {sorted(ring_map)}")
    if pending_bond is not None:
        raise ParseError("dangling bond symbol")
    if not g.atoms:
        raise ParseError("no atoms in SMILES")
    if sanitize:
        g.sanitize()
    return g


def _add_parsed_bond(g: MolGraph, a1: int, a2: int, sym: str | None) -> None:
    at1, at2 = g.atoms[a1], g.atoms[a2]
    if sym is None:
        if at1.aromatic and at2.aromatic:
            g.add_bond(a1, a2, 1, aromatic=True)  # kekulize demotes non-ring ones
        else:
            g.add_bond(a1, a2, 1)
    elif sym == "-":
        g.add_bond(a1, a2, 1)
    elif sym == "=":
        g.add_bond(a1, a2, 2)
    elif sym == "#":
        g.add_bond(a1, a2, 3)
    elif sym == ":":
        g.add_bond(a1, a2, 1, aromatic=True)
    else:
        raise ParseError(f"unsupported bond symbol {sym!r}")


# -- canonical SMILES -------------------------------------------------------


def _bond_key(b: Bond) -> int:
    return 4 if b.aromatic else b.order


def _initial_ranks(g: MolGraph) -> list[int]:
    keys = []
    for idx, a in enumerate(g.atoms):
        bkey = tuple(sorted(_bond_key(b) for b in g.bonds_of(idx)))
        keys.append((g.degree(idx), ATOMIC_NUM[a.symbol], int(a.aromatic), a.charge, a.n_h, bkey))
    order = sorted(set(keys))
    lookup = {k: i for i, k in enumerate(order)}
    return [lookup[k] for k in keys]


def _refine(g: MolGraph, ranks: list[int]) -> list[int]:
    n = len(ranks)
    while True:
        keys = []
        for idx in range(n):
            nbr = tuple(sorted((_bond_key(b), ranks[b.other(idx)]) for b in g.bonds_of(idx)))
            keys.append((ranks[idx], nbr))
        order = sorted(set(keys))
        lookup = {k: i for i, k in enumerate(order)}
        new = [lookup[k] for k in keys]
        if new == ranks:
            return new
        ranks = new


def canonical_smiles(g: MolGraph) -> str:
    """Canonical SMILES via refinement plus branching individualization."""
    if not g.atoms:
        return ""
    best: str | None = None
    leaves = 0

    stack = [_refine(g, _initial_ranks(g))]
    while stack:
        ranks = stack.pop()
        classes: dict[int, list[int]] = {}
        for idx, r in enumerate(ranks):
            classes.setdefault(r, []).append(idx)
        tied = None
        for r in sorted(classes):
            if len(classes[r]) > 1:
                tied = classes[r]
                break
        if tied is None:
            leaves += 1
            if leaves > 4096:
                raise SanitizeError("canonicalization budget exceeded")
            s = _write_smiles(g, ranks)
            if best is None or s < best:
                best = s
            continue
        for a in tied:
            nxt = [r * 2 for r in ranks]
            nxt[a] -= 1
            stack.append(_refine(g, nxt))
    assert best is not None
    return best


def _implied_bare_h(g: MolGraph, idx: int) -> int | None:
    """H count a bare (bracket-free) token would imply, or None if impossible."""
    a = g.atoms[idx]
    if a.charge != 0 or a.symbol not in ORGANIC_SUBSET:
        return None
    if a.aromatic:
        if a.symbol not in AROMATIC_OK:
            return None
        base = sum(1 if b.aromatic else b.order for b in g.bonds_of(idx))
        vals = allowed_valences(a.symbol, 0)
        fitting = [v for v in vals if v >= base]
        if not fitting:
            return None
        need = 1 if fitting[0] - base >= 1 else 0
        h = fitting[0] - base - need
        return h if h >= 0 else None
    bsum = g.bond_order_sum(idx)
    return default_valence(a.symbol, bsum) - bsum


def _atom_token(g: MolGraph, idx: int) -> str:
    a = g.atoms[idx]
    sym = a.symbol.lower() if a.aromatic else a.symbol
    if _implied_bare_h(g, idx) == a.n_h:
        return sym
    parts = [sym]
    if a.n_h == 1:
        parts.append("H")
    elif a.n_h > 1:
        parts.append(f"H{a.n_h}")
    if a.charge == 1:
        parts.append("+")
    elif a.charge == -1:
        parts.append("-")
    elif a.charge > 1:
        parts.append(f"+{a.charge}")
    elif a.charge < -1:
        parts.append(f"-{-a.charge}")
    return "[" + "".join(parts) + "]"


def _bond_token(g: MolGraph, b: Bond) -> str:
    if b.aromatic:
        return ""
    if b.order == 1:
        if g.atoms[b.a1].aromatic and g.atoms[b.a2].aromatic:
            return "-"
        return ""
    if b.order == 2:
        return "="
    if b.order == 3:
        return "#"
    raise SanitizeError(f"bad bond order {b.order}")


def _write_smiles(g: MolGraph, ranks: list[int]) -> str:
    bond_index: dict[tuple[int, int], int] = {}
    for i, b in enumerate(g.bonds):
        bond_index[(b.a1, b.a2)] = i
        bond_index[(b.a2, b.a1)] = i

    def sorted_nbrs(idx: int) -> list[tuple[int, Bond]]:
        out = [(b.other(idx), b) for b in g.bonds_of(idx)]
        out.sort(key=lambda t: ranks[t[0]])
        return out

    pieces: list[str] = []
    for comp in g.components():
        root = min(comp, key=lambda i: ranks[i])

        # pass 1: spanning tree and back edges, in write order
        parent_bond: dict[int, int] = {root: -1}
        back_bidx: set[int] = set()
        seen = {root}

        def scan(idx: int) -> None:
            for nb, _ in sorted_nbrs(idx):
                bidx = bond_index[(idx, nb)]
                if bidx == parent_bond[idx] or bidx in back_bidx:
                    continue
                if nb in seen:
                    back_bidx.add(bidx)
                    continue
                seen.add(nb)
                parent_bond[nb] = bidx
                scan(nb)

        scan(root)

        ring_partners: dict[int, list[tuple[int, Bond, int]]] = {}
        for bidx in back_bidx:
            b = g.bonds[bidx]
            ring_partners.setdefault(b.a1, []).append((b.a2, b, bidx))
            ring_partners.setdefault(b.a2, []).append((b.a1, b, bidx))

        out: list[str] = []
        free_digits = list(range(1, 100))
        digit_of_bond: dict[int, int] = {}

        def fmt_digit(d: int) -> str:
            return str(d) if d < 10 else f"%{d:02d}"

        def write_atom(idx: int) -> None:
            out.append(_atom_token(g, idx))
            for other, b, bidx in sorted(
                ring_partners.get(idx, []), key=lambda t: (ranks[t[0]], t[2])
            ):
                if bidx in digit_of_bond:
                    d = digit_of_bond.pop(bidx)
                    out.append(fmt_digit(d))
                    free_digits.append(d)
                    free_digits.sort()
                else:
                    d = free_digits.pop(0)
                    digit_of_bond[bidx] = d
                    out.append(_bond_token(g, b) + fmt_digit(d))

        def dfs_write(idx: int) -> None:
            write_atom(idx)
            children = []
            for nb, b in sorted_nbrs(idx):
                bidx = bond_index[(idx, nb)]
                if bidx == parent_bond[idx] or bidx in back_bidx:
                    continue
                if parent_bond.get(nb) == bidx:
                    children.append((nb, b))
            for i, (nb, b) in enumerate(children):
                btok = _bond_token(g, b)
                if i < len(children) - 1:
                    out.append("(" + btok)
                    dfs_write(nb)
                    out.append(")")
                else:
                    out.append(btok)
                    dfs_write(nb)

        dfs_write(root)
        pieces.append("".join(out))

    pieces.sort()
    return ".".join(pieces)
