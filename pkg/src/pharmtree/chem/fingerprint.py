"""Circular (Morgan-style) bit fingerprints with deterministic hashing.

Atom environments are hashed with splitmix64 so that bit assignments are
stable across processes and platforms (no dependence on Python's string
hash randomization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch
from .elements import ATOMIC_NUM
from .mol import MolGraph

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _hash_seq(values: tuple[int, ...]) -> int:
    h = 0x51_7C_C1_B7_27_22_0A_95
    for v in values:
        h = _splitmix64(h ^ (v & _MASK))
    return h


@dataclass(frozen=True)
class BitFingerprint:
    nbits: int
    bits: frozenset[int]
    radius: int = 3

    def to_array(self, dtype=np.float32) -> np.ndarray:
        arr = np.zeros(self.nbits, dtype=dtype)
        if self.bits:
            arr[sorted(self.bits)] = 1
        return arr

    def to_hex(self) -> str:
        nbytes = (self.nbits + 7) // 8
        buf = bytearray(nbytes)
        for b in self.bits:
            buf[b // 8] |= 1 << (b % 8)
        return bytes(buf).hex()

    @classmethod
    def from_hex(cls, hexstr: str, nbits: int, radius: int = 3) -> "BitFingerprint":
        buf = bytes.fromhex(hexstr)
        bits = {
            i for i in range(nbits) if buf[i // 8] & (1 << (i % 8))
        }
        return cls(nbits, frozenset(bits), radius)

    def __len__(self) -> int:
        return len(self.bits)


def morgan_fp(g: MolGraph, radius: int = 3, nbits: int = 4096) -> BitFingerprint:
    """Circular fingerprint over atom environments of radius 0..radius."""
    n = len(g.atoms)
    inv = []
    for idx in range(n):
        a = g.atoms[idx]
        inv.append(
            _hash_seq(
                (
                    ATOMIC_NUM[a.symbol],
                    g.degree(idx),
                    a.charge & _MASK,
                    a.n_h,
                    int(a.aromatic),
                    int(g.is_ring_atom(idx)),
                )
            )
        )
    features: set[int] = set(inv)
    for _ in range(radius):
        nxt = []
        for idx in range(n):
            nbrs = []
            for b in g.bonds_of(idx):
                key = 4 if b.aromatic else b.order
                nbrs.append((key, inv[b.other(idx)]))
            nbrs.sort()
            flat: list[int] = [inv[idx]]
            for key, h in nbrs:
                flat.extend((key, h))
            nxt.append(_hash_seq(tuple(flat)))
        inv = nxt
        features.update(inv)
    return BitFingerprint(nbits, frozenset(f % nbits for f in features), radius)


def tanimoto(a: BitFingerprint, b: BitFingerprint) -> float:
    """Jaccard similarity of two bit sets; two empty sets count as identical."""
    if a.nbits != b.nbits:
        raise LengthMismatch(f"fingerprint lengths differ: {a.nbits} vs {b.nbits}")
    union = len(a.bits | b.bits)
    if union == 0:
        return 1.0
    return len(a.bits & b.bits) / union
