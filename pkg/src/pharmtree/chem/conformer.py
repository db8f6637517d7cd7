"""Deterministic 3D embedding of molecular graphs.

Coordinates come from a distance-geometry recipe: target distances for
bonded pairs (covalent radii scaled by bond order), 1-3 pairs (law of
cosines over hybridization or ring interior angles), chords of aromatic
rings (planar regular polygons), and a lower-bound repulsion for everything
further apart. Classical MDS over graph distances gives the start point and
L-BFGS minimizes the harmonic objective. Heavy atoms only; a fixed seed
gives identical coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..errors import EmbedFailure
from .elements import COVALENT_RADIUS
from .mol import MolGraph

_ORDER_SCALE = {1: 1.00, 2: 0.87, 3: 0.78}
_AROMATIC_SCALE = 0.93
_MIN_NONBONDED = 2.55  # lower bound for pairs at graph distance >= 3
_HARD_TOL = 0.35       # max allowed violation of bonded/angle constraints


def _bond_length(g: MolGraph, a1: int, a2: int) -> float:
    b = g.find_bond(a1, a2)
    base = COVALENT_RADIUS[g.atoms[a1].symbol] + COVALENT_RADIUS[g.atoms[a2].symbol]
    if b is None:
        return base
    if b.aromatic:
        return base * _AROMATIC_SCALE
    return base * _ORDER_SCALE.get(b.order, 1.0)


def _hybrid_angle(g: MolGraph, idx: int) -> float:
    a = g.atoms[idx]
    bonds = g.bonds_of(idx)
    deg = len(bonds)
    if deg >= 4:
        return 109.47
    if deg == 2 and (
        any(b.order == 3 for b in bonds) or sum(1 for b in bonds if b.order == 2) >= 2
    ):
        return 180.0
    if a.aromatic or any(b.order == 2 for b in bonds):
        return 120.0
    return 109.47


def _graph_distances(g: MolGraph) -> np.ndarray:
    n = len(g.atoms)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for src in range(n):
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for node in frontier:
                for nb in g.neighbors(node):
                    if dist[src, nb] == np.inf:
                        dist[src, nb] = d
                        nxt.append(nb)
            frontier = nxt
    return dist


def _constraints(g: MolGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Arrays (i, j, target, weight) for harmonic pairs and the repulsion mask."""
    n = len(g.atoms)
    hard: dict[tuple[int, int], tuple[float, float]] = {}

    def put(i: int, j: int, d0: float, w: float) -> None:
        key = (min(i, j), max(i, j))
        if key not in hard or hard[key][1] < w:
            hard[key] = (d0, w)

    for b in g.bonds:
        put(b.a1, b.a2, _bond_length(g, b.a1, b.a2), 10.0)

    ring_lookup = g.rings()
    for center in range(n):
        nbrs = g.neighbors(center)
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, c = nbrs[i], nbrs[j]
                angle = _hybrid_angle(g, center)
                for ring in ring_lookup:
                    if center in ring and a in ring and c in ring:
                        m = len(ring)
                        angle = (m - 2) * 180.0 / m
                        break
                r1 = _bond_length(g, center, a)
                r2 = _bond_length(g, center, c)
                d0 = math.sqrt(
                    r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(math.radians(angle))
                )
                put(a, c, d0, 5.0)

    # planar regular polygon chords pin aromatic rings
    for ring in ring_lookup:
        if not all(g.atoms[i].aromatic for i in ring):
            continue
        m = len(ring)
        side = sum(
            _bond_length(g, ring[k], ring[(k + 1) % m]) for k in range(m)
        ) / m
        radius = side / (2 * math.sin(math.pi / m))
        for i in range(m):
            for j in range(i + 2, m):
                if (j - i) % m in (1, m - 1):
                    continue
                chord = 2 * radius * math.sin(math.pi * ((j - i) % m) / m)
                put(ring[i], ring[j], chord, 5.0)

    ii = np.array([k[0] for k in hard], dtype=np.int64)
    jj = np.array([k[1] for k in hard], dtype=np.int64)
    d0 = np.array([v[0] for v in hard.values()])
    ww = np.array([v[1] for v in hard.values()])
    return ii, jj, d0, ww


@dataclass(frozen=True)
class Conformer:
    coords: np.ndarray  # (n_heavy, 3) float64
    smiles: str
    seed: int

    def to_sdf(self, g: MolGraph, name: str = "") -> str:
        """V2000 SDF block for this conformer."""
        lines = [name, "  generated", ""]
        lines.append(
            f"{len(g.atoms):3d}{len(g.bonds):3d}  0  0  0  0  0  0  0  0999 V2000"
        )
        for idx, a in enumerate(g.atoms):
            x, y, z = self.coords[idx]
            lines.append(
                f"{x:10.4f}{y:10.4f}{z:10.4f} {a.symbol:<3s} 0  0  0  0  0  0  0  0  0  0  0  0"
            )
        for b in g.bonds:
            order = 4 if b.aromatic else b.order
            lines.append(f"{b.a1 + 1:3d}{b.a2 + 1:3d}{order:3d}  0  0  0  0")
        charged = [(i + 1, a.charge) for i, a in enumerate(g.atoms) if a.charge]
        if charged:
            parts = [f"M  CHG{len(charged):3d}"]
            for idx1, chg in charged:
                parts.append(f"{idx1:4d}{chg:4d}")
            lines.append("".join(parts))
        lines.append("M  END")
        lines.append("$$$$")
        return "\n".join(lines) + "\n"


def embed_coords(g: MolGraph, seed: int) -> np.ndarray:
    """Deterministic 3D coordinates for the heavy atoms of `g`."""
    n = len(g.atoms)
    if n == 0:
        raise EmbedFailure("no atoms to embed")
    if n == 1:
        return np.zeros((1, 3))
    rng = np.random.default_rng(seed)

    gd = _graph_distances(g)
    if np.isinf(gd).any():
        # disconnected: offset each component along x
        comps = g.components()
        coords = np.zeros((n, 3))
        offset = 0.0
        for comp in comps:
            sub = g.subgraph(sorted(comp))
            sub_coords = embed_coords(sub, seed)
            sub_coords = sub_coords - sub_coords.mean(axis=0)
            width = sub_coords[:, 0].max() - sub_coords[:, 0].min()
            for local, atom in enumerate(sorted(comp)):
                coords[atom] = sub_coords[local] + np.array([offset + width / 2, 0, 0])
            offset += width + 4.0
        return coords

    # classical MDS on graph distances scaled to rough bond length
    d = gd * 1.5
    d2 = d * d
    jmat = np.eye(n) - np.ones((n, n)) / n
    bmat = -0.5 * jmat @ d2 @ jmat
    vals, vecs = np.linalg.eigh(bmat)
    top = np.argsort(vals)[::-1][:3]
    lam = np.clip(vals[top], 0.0, None)
    x0 = vecs[:, top] * np.sqrt(lam)[None, :]
    if x0.shape[1] < 3:
        x0 = np.hstack([x0, np.zeros((n, 3 - x0.shape[1]))])
    x0 = x0 + rng.normal(0.0, 0.15, size=(n, 3))

    ii, jj, d0, ww = _constraints(g)
    far_i, far_j = np.where(np.triu(gd, 1) >= 3)
    hard_keys = set(zip(ii.tolist(), jj.tolist()))
    keep = [
        k for k in range(len(far_i))
        if (far_i[k], far_j[k]) not in hard_keys
    ]
    far_i, far_j = far_i[keep], far_j[keep]

    def objective(flat: np.ndarray) -> tuple[float, np.ndarray]:
        x = flat.reshape(n, 3)
        grad = np.zeros_like(x)
        diff = x[ii] - x[jj]
        dist = np.linalg.norm(diff, axis=1)
        dist = np.maximum(dist, 1e-8)
        delta = dist - d0
        e = float(np.sum(ww * delta * delta))
        coeff = (2 * ww * delta / dist)[:, None] * diff
        np.add.at(grad, ii, coeff)
        np.add.at(grad, jj, -coeff)
        if len(far_i):
            diff2 = x[far_i] - x[far_j]
            dist2 = np.linalg.norm(diff2, axis=1)
            dist2 = np.maximum(dist2, 1e-8)
            viol = np.maximum(0.0, _MIN_NONBONDED - dist2)
            e += float(np.sum(viol * viol))
            coeff2 = (-2 * viol / dist2)[:, None] * diff2
            np.add.at(grad, far_i, coeff2)
            np.add.at(grad, far_j, -coeff2)
        return e, grad.ravel()

    res = minimize(
        objective, x0.ravel(), jac=True, method="L-BFGS-B",
        options={"maxiter": 800, "ftol": 1e-12, "gtol": 1e-9},
    )
    x = res.x.reshape(n, 3)
    if not np.all(np.isfinite(x)):
        raise EmbedFailure("non-finite coordinates")
    diff = x[ii] - x[jj]
    dist = np.linalg.norm(diff, axis=1)
    worst = float(np.max(np.abs(dist - d0))) if len(d0) else 0.0
    if worst > _HARD_TOL:
        raise EmbedFailure(f"embedding violates constraints by {worst:.2f} A")
    return x - x.mean(axis=0)
