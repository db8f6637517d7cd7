"""Adapter for an external SMINA-compatible docking binary.

The binary is optional: when it is absent the adapter raises
ExternalToolMissing and nothing else in the suite depends on it. Ligands are
written as rigid single-conformer PDBQT with zero partial charges; receptor
preparation is the caller's responsibility.
"""

from __future__ import annotations

import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..chem.api import Molecule, canonicalize, gen_conformer
from ..errors import ExternalToolMissing, ToolFailure

DEFAULT_BOX_EDGE = 25.0
MAX_POSES = 10


@dataclass(frozen=True)
class DockingJob:
    receptor: str
    ligands: tuple[str, ...]
    center: tuple[float, float, float]
    box_edge: float = DEFAULT_BOX_EDGE
    n_poses: int = MAX_POSES
    executable: str = "smina"
    max_workers: int = 4

    def __post_init__(self):
        if not 1 <= self.n_poses <= MAX_POSES:
            raise ValueError(f"n_poses must be in [1, {MAX_POSES}]")
        if self.box_edge <= 0 or self.max_workers <= 0:
            raise ValueError("box_edge and max_workers must be positive")


def write_pdbqt(mol: Molecule, path: str | Path, seed: int = 0) -> None:
    """Rigid ligand PDBQT: one ROOT block, TORSDOF 0, zero charges."""
    conf = gen_conformer(mol, seed=seed)
    g = mol.graph
    lines = ["ROOT"]
    for i, atom in enumerate(g.atoms):
        x, y, z = conf.coords[i]
        sym = atom.symbol
        lines.append(
            f"ATOM  {i + 1:>5d} {sym:<4.4s} LIG A   1    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00    "
            f"{0.0:6.3f} {sym:<2.2s}"
        )
    lines.append("ENDROOT")
    lines.append("TORSDOF 0")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_affinities(text: str) -> list[float]:
    """Affinity column (kcal/mol) of the standard pose table, best first.

    The table starts after the '-----+----' rule; each row is
    'mode  affinity  rmsd_lb  rmsd_ub'.
    """
    scores: list[float] = []
    in_table = False
    for line in text.splitlines():
        if line.lstrip().startswith("-----"):
            in_table = True
            continue
        if not in_table:
            continue
        parts = line.split()
        if len(parts) < 2 or not parts[0].isdigit():
            break
        scores.append(float(parts[1]))
    return scores


def _dock_one(job: DockingJob, smiles: str, workdir: Path, idx: int) -> float:
    lig = workdir / f"ligand_{idx}.pdbqt"
    write_pdbqt(canonicalize(smiles), lig)
    cx, cy, cz = job.center
    cmd = [
        job.executable,
        "--receptor", job.receptor,
        "--ligand", str(lig),
        "--center_x", str(cx), "--center_y", str(cy), "--center_z", str(cz),
        "--size_x", str(job.box_edge), "--size_y", str(job.box_edge),
        "--size_z", str(job.box_edge),
        "--num_modes", str(job.n_poses),
    ]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True)
    except FileNotFoundError:
        raise ExternalToolMissing(f"docking binary not found: {job.executable}")
    if proc.returncode != 0:
        raise ToolFailure(
            f"{job.executable} exited {proc.returncode} for ligand {idx}:\n"
            f"{proc.stdout}\n{proc.stderr}"
        )
    scores = parse_affinities(proc.stdout)
    if not scores:
        raise ToolFailure(f"no affinity table in output for ligand {idx}:\n{proc.stdout}")
    return scores[0]


def dock(job: DockingJob) -> list[float]:
    """Best-pose affinity per ligand, in input order."""
    if not job.ligands:
        return []
    if shutil.which(job.executable) is None:
        raise ExternalToolMissing(f"docking binary not found: {job.executable}")
    with tempfile.TemporaryDirectory(prefix="dock_") as td:
        workdir = Path(td)
        with ThreadPoolExecutor(max_workers=job.max_workers) as pool:
            futures = [
                pool.submit(_dock_one, job, smi, workdir, i)
                for i, smi in enumerate(job.ligands)
            ]
            return [f.result() for f in futures]
