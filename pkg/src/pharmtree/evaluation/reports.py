"""Similarity and property reports plus the random synthesis baseline.

Similarity uses Morgan radius 2 over 4096 bits, both on the whole molecule
and on its ring-and-linker scaffold. An acyclic molecule has the empty
scaffold, which fingerprints to the all-zero vector: zero against any real
scaffold, one against another empty scaffold.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..chem.api import Molecule, canonicalize, morgan_fp, murcko_scaffold, properties
from ..chem.fingerprint import tanimoto
from ..synthesis.catalog import Catalog
from ..synthesis.reaction import ReactionTemplate
from ..synthesis.tree import sample_tree

SIM_RADIUS = 2
SIM_NBITS = 4096


def _as_mol(m: Molecule | str) -> Molecule:
    return m if isinstance(m, Molecule) else canonicalize(m)


def _sim_fp(mol: Molecule):
    return morgan_fp(mol, radius=SIM_RADIUS, nbits=SIM_NBITS)


@dataclass(frozen=True)
class SimilarityReport:
    """Per-molecule similarity to one reference, with aggregates."""

    smiles: tuple[str, ...]
    tanimoto: tuple[float, ...]
    murcko_tanimoto: tuple[float, ...]

    def _agg(self, values: tuple[float, ...]) -> dict:
        return {
            "mean": float(np.mean(values)),
            "min": float(min(values)),
            "max": float(max(values)),
        }

    @property
    def aggregates(self) -> dict:
        return {
            "tanimoto": self._agg(self.tanimoto),
            "murcko_tanimoto": self._agg(self.murcko_tanimoto),
        }

    def to_json(self) -> str:
        rows = [
            {"smiles": s, "tanimoto": t, "murcko_tanimoto": m}
            for s, t, m in zip(self.smiles, self.tanimoto, self.murcko_tanimoto)
        ]
        return json.dumps(
            {"rows": rows, "aggregates": self.aggregates},
            sort_keys=True, separators=(",", ":"),
        )

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["smiles", "tanimoto", "murcko_tanimoto"])
            for s, t, m in zip(self.smiles, self.tanimoto, self.murcko_tanimoto):
                w.writerow([s, f"{t:.6f}", f"{m:.6f}"])


def similarity_report(
    generated: list[Molecule | str],
    reference: Molecule | str,
) -> SimilarityReport:
    """Pairwise similarity of each generated molecule to one reference."""
    if not generated:
        raise ValueError("empty generated set")
    ref = _as_mol(reference)
    ref_fp = _sim_fp(ref)
    ref_scaf = _sim_fp(murcko_scaffold(ref))
    smis, tans, murckos = [], [], []
    for g in generated:
        mol = _as_mol(g)
        smis.append(mol.smiles)
        tans.append(tanimoto(_sim_fp(mol), ref_fp))
        murckos.append(tanimoto(_sim_fp(murcko_scaffold(mol)), ref_scaf))
    return SimilarityReport(tuple(smis), tuple(tans), tuple(murckos))


@dataclass(frozen=True)
class PropertyTable:
    """Set-level property summary: MW mean, logP tail percentiles, QED mean."""

    n: int
    mw_mean: float
    logp_p5: float
    logp_p95: float
    qed_mean: float

    def __post_init__(self):
        if self.logp_p5 > self.logp_p95:
            raise ValueError("logp_p5 must not exceed logp_p95")

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n, "mw_mean": self.mw_mean,
                "logp_p5": self.logp_p5, "logp_p95": self.logp_p95,
                "qed_mean": self.qed_mean,
            },
            sort_keys=True, separators=(",", ":"),
        )

    def render(self) -> str:
        head = f"{'n':>6} {'MW mean':>10} {'logP 5%':>10} {'logP 95%':>10} {'QED':>8}"
        row = (
            f"{self.n:>6d} {self.mw_mean:>10.2f} {self.logp_p5:>10.2f} "
            f"{self.logp_p95:>10.2f} {self.qed_mean:>8.3f}"
        )
        return head + "\n" + row


def property_table(molecules: list[Molecule | str]) -> PropertyTable:
    """Percentiles use linear interpolation between order statistics."""
    if not molecules:
        raise ValueError("empty molecule set")
    recs = [properties(_as_mol(m)) for m in molecules]
    logps = np.array([r.logp for r in recs], dtype=np.float64)
    return PropertyTable(
        n=len(recs),
        mw_mean=float(np.mean([r.mw for r in recs])),
        logp_p5=float(np.percentile(logps, 5.0)),
        logp_p95=float(np.percentile(logps, 95.0)),
        qed_mean=float(np.mean([r.qed for r in recs])),
    )


def random_baseline(
    catalog: Catalog,
    templates: list[ReactionTemplate],
    n: int,
    seed: int = 0,
    max_depth: int = 4,
) -> list[Molecule]:
    """Final molecules of n random replay-valid routes."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    return [
        canonicalize(sample_tree(catalog, templates, max_depth, rng).final)
        for _ in range(n)
    ]
