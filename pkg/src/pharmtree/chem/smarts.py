"""Substructure query language: a practical SMARTS subset.

Supported atom primitives: elements (bare and bracketed, aromatic lowercase
forms), #n, *, A, a, D<n>, H<n>, X<n>, R, R0, r<n>, charges, atom maps and
recursive $(...) environments. Logic: ! > & (or adjacency) > , > ;.
Bonds: - = # : ~ plus the default single-or-aromatic. Patterns may branch
and use ring closures. Matching is backtracking subgraph embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .elements import ATOMIC_NUM
from .mol import Bond, MolGraph, ParseError

AROMATIC_ELEMS = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
TWO_LETTER = ("Cl", "Br")

# Expression trees are nested tuples:
#   ("prim", kind, value) | ("not", expr) | ("and", [exprs]) | ("or", [exprs])


@dataclass
class PatAtom:
    expr: tuple
    map_num: int = 0


@dataclass
class PatBond:
    a1: int
    a2: int
    kind: str | None = None  # '-', '=', '#', ':', '~' or None (single-or-aromatic)


@dataclass
class Pattern:
    atoms: list[PatAtom] = field(default_factory=list)
    bonds: list[PatBond] = field(default_factory=list)

    def neighbors(self, idx: int) -> list[tuple[int, PatBond]]:
        out = []
        for b in self.bonds:
            if b.a1 == idx:
                out.append((b.a2, b))
            elif b.a2 == idx:
                out.append((b.a1, b))
        return out


# -- parsing -----------------------------------------------------------------


class _Scanner:
    def __init__(self, s: str):
        self.s = s
        self.pos = 0

    def peek(self) -> str:
        return self.s[self.pos] if self.pos < len(self.s) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def number(self, default: int | None = None) -> int | None:
        num = ""
        while self.peek().isdigit():
            num += self.take()
        return int(num) if num else default


def _parse_bracket_expr(sc: _Scanner) -> tuple[tuple, int]:
    """Parse bracket body up to ']'. Returns (expr, map_num)."""
    map_num = 0

    def parse_low() -> tuple:
        terms = [parse_or()]
        while sc.peek() == ";":
            sc.take()
            terms.append(parse_or())
        return terms[0] if len(terms) == 1 else ("and", terms)

    def parse_or() -> tuple:
        terms = [parse_and()]
        while sc.peek() == ",":
            sc.take()
            terms.append(parse_and())
        return terms[0] if len(terms) == 1 else ("or", terms)

    def parse_and() -> tuple:
        terms = [parse_factor()]
        while True:
            ch = sc.peek()
            if ch == "&":
                sc.take()
                terms.append(parse_factor())
            elif ch and ch not in ";,]":
                terms.append(parse_factor())
            else:
                break
        return terms[0] if len(terms) == 1 else ("and", terms)

    def parse_factor() -> tuple:
        nonlocal map_num
        ch = sc.peek()
        if ch == "!":
            sc.take()
            return ("not", parse_factor())
        if ch == "$":
            sc.take()
            if sc.take() != "(":
                raise ParseError("expected '(' after $")
            depth = 1
            start = sc.pos
            while depth > 0:
                c = sc.take()
                if not c:
                    raise ParseError("unclosed $(...) in SMARTS")
                if c == "(":
                    depth += 1
                elif c == ")":
                    depth -= 1
            inner = sc.s[start:sc.pos - 1]
            return ("prim", "recursive", parse_smarts(inner))
        if ch == "#":
            sc.take()
            num = sc.number()
            if num is None:
                raise ParseError("expected number after #")
            return ("prim", "anum", num)
        if ch == "*":
            sc.take()
            return ("prim", "any", None)
        if ch == "A":
            sc.take()
            return ("prim", "aliphatic", None)
        if ch == "a":
            sc.take()
            return ("prim", "aromatic", None)
        if ch == "D":
            sc.take()
            return ("prim", "degree", sc.number(1))
        if ch == "H":
            sc.take()
            return ("prim", "hcount", sc.number(1))
        if ch == "X":
            sc.take()
            return ("prim", "conn", sc.number(1))
        if ch == "R":
            sc.take()
            n = sc.number()
            if n == 0:
                return ("not", ("prim", "inring", None))
            return ("prim", "inring", None)
        if ch == "r":
            sc.take()
            n = sc.number()
            if n is None:
                return ("prim", "inring", None)
            return ("prim", "ringsize", n)
        if ch == "+" or ch == "-":
            sign = 1 if ch == "+" else -1
            sc.take()
            n = sc.number()
            if n is None:
                n = 1
                while sc.peek() == ch:
                    sc.take()
                    n += 1
            return ("prim", "charge", sign * n)
        if ch == ":":
            sc.take()
            num = sc.number()
            if num is None:
                raise ParseError("expected number after : in SMARTS bracket")
            map_num = num
            return ("prim", "true", None)
        for two in TWO_LETTER:
            if sc.s[sc.pos:sc.pos + 2] == two:
                sc.pos += 2
                return ("prim", "elem_aliph", two)
        if ch.isupper():
            sc.take()
            if ch not in ATOMIC_NUM:
                raise ParseError(f"unknown element {ch!r} in SMARTS bracket")
            return ("prim", "elem_aliph", ch)
        if ch in AROMATIC_ELEMS:
            sc.take()
            return ("prim", "elem_arom", AROMATIC_ELEMS[ch])
        if ch.isdigit():
            # bare leading digit: isotope; accepted and ignored
            sc.number()
            return ("prim", "true", None)
        raise ParseError(f"unexpected {ch!r} in SMARTS bracket")

    expr = parse_low()
    if sc.peek() != "]":
        raise ParseError(f"unclosed SMARTS bracket near position {sc.pos}")
    sc.take()
    # drop no-op "true" terms introduced by map/isotope tokens
    expr = _strip_true(expr)
    return expr, map_num


def _strip_true(expr: tuple) -> tuple:
    kind = expr[0]
    if kind == "and":
        kept = [_strip_true(t) for t in expr[1]]
        kept = [t for t in kept if t != ("prim", "true", None)]
        if not kept:
            return ("prim", "any", None)
        return kept[0] if len(kept) == 1 else ("and", kept)
    if kind == "or":
        return ("or", [_strip_true(t) for t in expr[1]])
    if kind == "not":
        return ("not", _strip_true(expr[1]))
    if expr == ("prim", "true", None):
        return ("prim", "any", None)
    return expr


def parse_smarts(s: str) -> Pattern:
    """Parse a SMARTS pattern into a Pattern graph."""
    if not s or not s.strip():
        raise ParseError("empty SMARTS")
    sc = _Scanner(s.strip())
    pat = Pattern()
    prev: int | None = None
    pending: str | None = None
    stack: list[int] = []
    ring_map: dict[int, tuple[int, str | None]] = {}

    def add_atom(expr: tuple, map_num: int = 0) -> None:
        nonlocal prev, pending
        idx = len(pat.atoms)
        pat.atoms.append(PatAtom(expr, map_num))
        if prev is not None:
            pat.bonds.append(PatBond(prev, idx, pending))
        prev = idx
        pending = None

    def ring_digit(num: int) -> None:
        nonlocal pending
        if prev is None:
            raise ParseError("ring closure before any atom in SMARTS")
        if num in ring_map:
            other, sym0 = ring_map.pop(num)
            if other == prev:
                raise ParseError("ring closure to self in SMARTS")
            pat.bonds.append(PatBond(other, prev, pending or sym0))
        else:
            ring_map[num] = (prev, pending)
        pending = None

    while sc.pos < len(sc.s):
        ch = sc.peek()
        if ch == "[":
            sc.take()
            expr, map_num = _parse_bracket_expr(sc)
            add_atom(expr, map_num)
        elif ch == "*":
            sc.take()
            add_atom(("prim", "any", None))
        elif ch.isalpha():
            matched = False
            for two in TWO_LETTER:
                if sc.s[sc.pos:sc.pos + 2] == two:
                    sc.pos += 2
                    add_atom(("prim", "elem_aliph", two))
                    matched = True
                    break
            if matched:
                pass
            elif ch.isupper() and ch in ATOMIC_NUM and ch != "H":
                sc.take()
                add_atom(("prim", "elem_aliph", ch))
            elif ch == "a":
                sc.take()
                add_atom(("prim", "aromatic", None))
            elif ch == "A":
                sc.take()
                add_atom(("prim", "aliphatic", None))
            elif ch in AROMATIC_ELEMS:
                sc.take()
                add_atom(("prim", "elem_arom", AROMATIC_ELEMS[ch]))
            else:
                raise ParseError(f"unexpected symbol {ch!r} in SMARTS")
        elif ch in "-=#:~/\\":
            sc.take()
            if pending is not None:
                raise ParseError("double bond symbol in SMARTS")
            pending = "-" if ch in "/\\" else ch
        elif ch.isdigit():
            sc.take()
            ring_digit(int(ch))
        elif ch == "%":
            sc.take()
            two = sc.s[sc.pos:sc.pos + 2]
            if not two.isdigit():
                raise ParseError("bad %nn ring closure in SMARTS")
            sc.pos += 2
            ring_digit(int(two))
        elif ch == "(":
            sc.take()
            if prev is None:
                raise ParseError("branch before any atom in SMARTS")
            stack.append(prev)
        elif ch == ")":
            sc.take()
            if not stack:
                raise ParseError("unbalanced ')' in SMARTS")
            prev = stack.pop()
        elif ch == ".":
            raise ParseError("disconnected SMARTS patterns are not supported")
        else:
            raise ParseError(f"unexpected character {ch!r} in SMARTS")
    if stack:
        raise ParseError("unbalanced '(' in SMARTS")
    if ring_map:
        raise ParseError(f"unclosed SMARTS ring closures: {sorted(ring_map)}")
    if pending is not None:
        raise ParseError("dangling bond symbol in SMARTS")
    if not pat.atoms:
        raise ParseError("no atoms in SMARTS")
    return pat


# -- evaluation ---------------------------------------------------------------


def _atom_matches(expr: tuple, g: MolGraph, idx: int) -> bool:
    kind = expr[0]
    if kind == "not":
        return not _atom_matches(expr[1], g, idx)
    if kind == "and":
        return all(_atom_matches(t, g, idx) for t in expr[1])
    if kind == "or":
        return any(_atom_matches(t, g, idx) for t in expr[1])
    _, prim, val = expr
    a = g.atoms[idx]
    if prim == "any" or prim == "true":
        return True
    if prim == "elem_aliph":
        return a.symbol == val and not a.aromatic
    if prim == "elem_arom":
        return a.symbol == val and a.aromatic
    if prim == "anum":
        return ATOMIC_NUM[a.symbol] == val
    if prim == "aromatic":
        return a.aromatic
    if prim == "aliphatic":
        return not a.aromatic
    if prim == "degree":
        return g.degree(idx) == val
    if prim == "hcount":
        return a.n_h == val
    if prim == "conn":
        return g.degree(idx) + a.n_h == val
    if prim == "charge":
        return a.charge == val
    if prim == "inring":
        return g.is_ring_atom(idx)
    if prim == "ringsize":
        return val in g.ring_sizes_of(idx)
    if prim == "recursive":
        return bool(_match(val, g, anchor=idx, limit=1))
    raise ParseError(f"unknown SMARTS primitive {prim!r}")


def _bond_matches(kind: str | None, b: Bond) -> bool:
    if kind is None:
        return b.aromatic or b.order == 1
    if kind == "~":
        return True
    if kind == ":":
        return b.aromatic
    if kind == "-":
        return b.order == 1 and not b.aromatic
    if kind == "=":
        return b.order == 2 and not b.aromatic
    if kind == "#":
        return b.order == 3
    raise ParseError(f"unknown SMARTS bond {kind!r}")


def _search_order(pat: Pattern) -> list[tuple[int, int | None, PatBond | None]]:
    """(pattern atom, anchor atom, anchor bond) triples in a connected order."""
    n = len(pat.atoms)
    order: list[tuple[int, int | None, PatBond | None]] = []
    seen: set[int] = set()
    for start in range(n):
        if start in seen:
            continue
        if order:
            raise ParseError("disconnected SMARTS patterns are not supported")
        seen.add(start)
        order.append((start, None, None))
        queue = [start]
        while queue:
            cur = queue.pop(0)
            for nb, b in pat.neighbors(cur):
                if nb not in seen:
                    seen.add(nb)
                    order.append((nb, cur, b))
                    queue.append(nb)
    return order


def _match(
    pat: Pattern,
    g: MolGraph,
    anchor: int | None = None,
    limit: int | None = None,
) -> list[tuple[int, ...]]:
    order = _search_order(pat)
    n = len(pat.atoms)
    results: list[tuple[int, ...]] = []
    assign: dict[int, int] = {}
    used: set[int] = set()

    def ok_with_assigned(pidx: int, gidx: int) -> bool:
        for nb, b in pat.neighbors(pidx):
            if nb in assign:
                gb = g.find_bond(gidx, assign[nb])
                if gb is None or not _bond_matches(b.kind, gb):
                    return False
        return True

    def extend(pos: int) -> bool:
        if pos == n:
            results.append(tuple(assign[i] for i in range(n)))
            return limit is not None and len(results) >= limit
        pidx, panchor, _ = order[pos]
        expr = pat.atoms[pidx].expr
        if panchor is None:
            candidates = [anchor] if anchor is not None else range(len(g.atoms))
        else:
            candidates = g.neighbors(assign[panchor])
        for gidx in candidates:
            if gidx in used:
                continue
            if not _atom_matches(expr, g, gidx):
                continue
            if not ok_with_assigned(pidx, gidx):
                continue
            assign[pidx] = gidx
            used.add(gidx)
            if extend(pos + 1):
                return True
            del assign[pidx]
            used.discard(gidx)
        return False

    extend(0)
    return results


def find_matches(pattern: Pattern, g: MolGraph, limit: int = 256) -> list[tuple[int, ...]]:
    """All embeddings of `pattern` in `g`, capped at `limit`."""
    return _match(pattern, g, limit=limit)


def has_match(pattern: Pattern, g: MolGraph) -> bool:
    return bool(_match(pattern, g, limit=1))
