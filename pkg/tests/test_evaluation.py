"""Similarity/property reports, the random synthesis baseline, and the
docking adapter (fixture-driven, no external binary)."""

from __future__ import annotations

import json
import stat
from pathlib import Path

import numpy as np
import pytest

from pharmtree.chem import canonicalize
from pharmtree.chem.props import logp
from pharmtree.errors import ExternalToolMissing, ToolFailure
from pharmtree.evaluation import (
    DockingJob,
    dock,
    parse_affinities,
    property_table,
    random_baseline,
    similarity_report,
    write_pdbqt,
)

FIXTURE = Path(__file__).parent / "fixtures" / "docking_output.txt"
FROZEN_SCORES = [-7.5, -7.2, -6.9, -6.1]


class TestSimilarity:
    def test_identical_is_one(self):
        rep = similarity_report(["c1ccccc1O"], "Oc1ccccc1")
        assert rep.tanimoto == (1.0,)
        assert rep.murcko_tanimoto == (1.0,)

    def test_acyclic_vs_ring_scaffold_zero(self):
        rep = similarity_report(["CCO"], "c1ccccc1")
        assert rep.murcko_tanimoto == (0.0,)

    def test_both_acyclic_scaffold_one(self):
        rep = similarity_report(["CCO"], "CCCC")
        assert rep.murcko_tanimoto == (1.0,)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            similarity_report([], "CCO")

    def test_aggregates_brute_force(self):
        mols = ["CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1", "CCN"]
        rep = similarity_report(mols, "CCOC")
        agg = rep.aggregates["tanimoto"]
        assert agg["mean"] == pytest.approx(sum(rep.tanimoto) / len(rep.tanimoto))
        assert agg["min"] == min(rep.tanimoto)
        assert agg["max"] == max(rep.tanimoto)

    def test_json_and_csv(self, tmp_path):
        rep = similarity_report(["CCO", "CCN"], "CCO")
        obj = json.loads(rep.to_json())
        assert len(obj["rows"]) == 2
        path = tmp_path / "sim.csv"
        rep.write_csv(path)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert lines[1].split(",")[1] == "1.000000"


class TestPropertyTable:
    MOLS = ["CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1", "CCCCCCCC", "OCC(O)CO"]

    def test_against_numpy(self):
        table = property_table(self.MOLS)
        from pharmtree.chem.api import properties

        recs = [properties(canonicalize(s)) for s in self.MOLS]
        assert table.n == 5
        assert table.mw_mean == pytest.approx(np.mean([r.mw for r in recs]))
        logps = [r.logp for r in recs]
        assert table.logp_p5 == pytest.approx(np.percentile(logps, 5.0))
        assert table.logp_p95 == pytest.approx(np.percentile(logps, 95.0))
        assert table.qed_mean == pytest.approx(np.mean([r.qed for r in recs]))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            property_table([])

    def test_render_and_json(self):
        table = property_table(self.MOLS)
        text = table.render()
        assert "logP" in text and "QED" in text
        obj = json.loads(table.to_json())
        assert obj["n"] == 5


class TestRandomBaseline:
    def test_deterministic(self, catalog, templates):
        a = random_baseline(catalog, templates, n=6, seed=9)
        b = random_baseline(catalog, templates, n=6, seed=9)
        assert [m.smiles for m in a] == [m.smiles for m in b]
        assert len(a) == 6

    def test_seed_changes_output(self, catalog, templates):
        a = random_baseline(catalog, templates, n=6, seed=1)
        b = random_baseline(catalog, templates, n=6, seed=2)
        assert [m.smiles for m in a] != [m.smiles for m in b]


class TestDockingParse:
    def test_fixture_reproduces_frozen_scores(self):
        assert parse_affinities(FIXTURE.read_text()) == FROZEN_SCORES

    def test_table_stops_at_first_non_row(self):
        text = FIXTURE.read_text().replace("2       -7.2", "done    -7.2")
        assert parse_affinities(text) == [-7.5]

    def test_no_table_gives_empty(self):
        assert parse_affinities("nothing to see\nhere\n") == []


class TestPdbqt:
    def test_rigid_block_structure(self, tmp_path):
        path = tmp_path / "lig.pdbqt"
        write_pdbqt(canonicalize("CCO"), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "ROOT"
        assert lines[-2] == "ENDROOT"
        assert lines[-1] == "TORSDOF 0"
        atoms = [l for l in lines if l.startswith("ATOM")]
        assert len(atoms) == canonicalize("CCO").graph.n_atoms()
        x = float(atoms[0][30:38])
        assert np.isfinite(x)

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.pdbqt", tmp_path / "b.pdbqt"
        write_pdbqt(canonicalize("CCO"), a, seed=3)
        write_pdbqt(canonicalize("CCO"), b, seed=3)
        assert a.read_bytes() == b.read_bytes()


def _fake_tool(tmp_path: Path, name: str, script: str) -> str:
    path = tmp_path / name
    path.write_text("#!/bin/sh\n" + script)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


class TestDock:
    def test_empty_ligands(self):
        job = DockingJob("rec.pdbqt", (), (0.0, 0.0, 0.0))
        assert dock(job) == []

    def test_missing_binary(self):
        job = DockingJob(
            "rec.pdbqt", ("CCO",), (0.0, 0.0, 0.0),
            executable="no-such-docking-binary",
        )
        with pytest.raises(ExternalToolMissing):
            dock(job)

    def test_best_score_per_ligand(self, tmp_path):
        exe = _fake_tool(tmp_path, "ok_tool", f'cat "{FIXTURE}"\n')
        job = DockingJob("rec.pdbqt", ("CCO", "CCN"), (1.0, 2.0, 3.0), executable=exe)
        assert dock(job) == [-7.5, -7.5]

    def test_nonzero_exit_is_tool_failure(self, tmp_path):
        exe = _fake_tool(tmp_path, "bad_tool", 'echo boom >&2\nexit 1\n')
        job = DockingJob("rec.pdbqt", ("CCO",), (0.0, 0.0, 0.0), executable=exe)
        with pytest.raises(ToolFailure, match="boom"):
            dock(job)

    def test_scoreless_output_is_tool_failure(self, tmp_path):
        exe = _fake_tool(tmp_path, "mute_tool", 'echo done\n')
        job = DockingJob("rec.pdbqt", ("CCO",), (0.0, 0.0, 0.0), executable=exe)
        with pytest.raises(ToolFailure):
            dock(job)

    def test_job_validation(self):
        with pytest.raises(ValueError):
            DockingJob("r", (), (0.0, 0.0, 0.0), n_poses=11)
        with pytest.raises(ValueError):
            DockingJob("r", (), (0.0, 0.0, 0.0), box_edge=-1.0)
