"""Catalog loading, reaction application, and synthetic-tree machinery."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from pharmtree.chem import canonicalize
from pharmtree.errors import (
    ArityMismatch,
    DuplicateEntry,
    EmptyCatalog,
    NoProduct,
    ReplayMismatch,
    UnknownBlock,
)
from pharmtree.synthesis import (
    SyntheticTree,
    TreeStep,
    applicable,
    apply_reaction,
    replay,
    sample_tree,
)
from pharmtree.synthesis.tree import (
    ORDER_FORWARD,
    ORDER_SEED,
    ORDER_SWAPPED,
    ORDER_UNIMOL,
    extend_tree,
)


class TestCatalog:
    def test_loads_bundled(self, catalog, templates):
        assert len(catalog) >= 250
        assert len(templates) == 20

    def test_ids_unique_and_sorted_access(self, catalog):
        ids = [b.id for b in catalog.blocks]
        assert len(ids) == len(set(ids))
        some = catalog.blocks[10]
        assert catalog.get(some.id).mol.smiles == some.mol.smiles

    def test_unknown_block_raises(self, catalog):
        with pytest.raises(UnknownBlock):
            catalog.get(10_000_000)

    def test_smiles_canonical(self, catalog):
        for b in catalog.blocks[:40]:
            assert canonicalize(b.mol.smiles).smiles == b.mol.smiles

    def test_digest_stable_and_content_bound(self, catalog):
        assert catalog.digest() == catalog.digest()
        assert len(catalog.digest()) == 64

    def test_duplicate_id_rejected(self, tmp_path):
        p = tmp_path / "cat.tsv"
        p.write_text("# id\tSMILES\n1\tCCO\n1\tCCN\n")
        from pharmtree.synthesis import load_catalog

        with pytest.raises(DuplicateEntry):
            load_catalog(p)

    def test_empty_rejected(self, tmp_path):
        p = tmp_path / "cat.tsv"
        p.write_text("# id\tSMILES\n")
        from pharmtree.synthesis import load_catalog

        with pytest.raises(EmptyCatalog):
            load_catalog(p)


class TestReactions:
    @staticmethod
    def _amide(templates):
        acid, amine = canonicalize("CC(=O)O"), canonicalize("NCC")
        return next(t for t in templates
                    if t.arity == 2 and applicable(t, (acid, amine)))

    def test_amide_coupling_golden(self, templates):
        amide = self._amide(templates)
        acid = canonicalize("CC(=O)O")
        amine = canonicalize("NCC")
        product = apply_reaction(amide, (acid, amine))
        assert product.smiles == canonicalize("CC(=O)NCC").smiles

    def test_inapplicable_pair(self, templates):
        amide = self._amide(templates)
        assert not applicable(amide, (canonicalize("CCCC"), canonicalize("CCCC")))

    def test_apply_on_nonmatching_raises(self, templates):
        amide = self._amide(templates)
        with pytest.raises(NoProduct):
            apply_reaction(amide, (canonicalize("CCCC"), canonicalize("CCCC")))

    def test_arity_enforced(self, templates):
        bimol = next(t for t in templates if t.arity == 2)
        with pytest.raises(ArityMismatch):
            apply_reaction(bimol, (canonicalize("CC(=O)O"),))

    def test_products_sanitized(self, catalog, templates):
        rng = random.Random(5)
        for _ in range(30):
            tree = sample_tree(catalog, templates, 3, rng)
            assert canonicalize(tree.final).smiles == tree.final


class TestTrees:
    def test_depth_counts_seed(self, catalog, templates):
        rng = random.Random(0)
        tree = sample_tree(catalog, templates, 1, rng)
        assert tree.depth == 1
        assert tree.steps[0].order == ORDER_SEED
        assert tree.steps[0].reaction is None

    def test_products_align_with_steps(self, catalog, templates):
        rng = random.Random(1)
        for _ in range(20):
            tree = sample_tree(catalog, templates, 4, rng)
            assert len(tree.products) == len(tree.steps)
            assert tree.final == tree.products[-1]

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=50, deadline=None)
    def test_replay_reproduces_sampled_tree(self, catalog, templates, seed):
        rng = random.Random(seed)
        tree = sample_tree(catalog, templates, 4, rng)
        assert 1 <= tree.depth <= 4
        result = replay(tree, catalog, templates)
        assert result.smiles == tree.final

    def test_replay_checks_recorded_products(self, catalog, templates):
        rng = random.Random(3)
        tree = sample_tree(catalog, templates, 3, rng)
        while tree.depth < 2:
            tree = sample_tree(catalog, templates, 3, rng)
        broken = SyntheticTree(
            steps=tree.steps,
            products=[tree.products[0]] + ["CCO"] * (len(tree.products) - 1),
            final="CCO",
        )
        with pytest.raises(ReplayMismatch):
            replay(broken, catalog, templates)

    def test_extend_tree_orders(self, catalog, templates):
        rng = random.Random(7)
        seen = set()
        current = catalog.blocks[0].mol
        for _ in range(40):
            try:
                step, product = extend_tree(current, catalog, templates, rng)
            except Exception:
                break
            seen.add(step.order)
        assert seen <= {ORDER_FORWARD, ORDER_SWAPPED, ORDER_UNIMOL}

    def test_json_roundtrip(self, catalog, templates):
        rng = random.Random(9)
        tree = sample_tree(catalog, templates, 4, rng)
        again = SyntheticTree.from_json(json.loads(json.dumps(tree.to_json())))
        assert again.to_json() == tree.to_json()
        assert replay(again, catalog, templates).smiles == tree.final

    def test_seed_root_with_smiles_replays(self, catalog, templates):
        seed = canonicalize("OC(=O)c1ccc(N)cc1")
        tree = SyntheticTree(
            steps=[TreeStep(None, None, ORDER_SEED, smiles=seed.smiles)],
            products=[seed.smiles],
            final=seed.smiles,
        )
        assert replay(tree, catalog, templates).smiles == seed.smiles


class TestDataset:
    def test_make_dataset_deterministic(self, catalog, templates):
        from pharmtree.synthesis import make_dataset

        a = [t.to_json() for t in make_dataset(catalog, templates, 5, 3, seed=2)]
        b = [t.to_json() for t in make_dataset(catalog, templates, 5, 3, seed=2)]
        assert a == b

    def test_triples_file_roundtrip(self, catalog, templates, tmp_path):
        from pharmtree.synthesis import make_dataset, read_triples, write_triples

        triples = list(make_dataset(catalog, templates, 4, 3, seed=8))
        path = tmp_path / "triples.jsonl"
        assert write_triples(triples, path) == 4
        again = read_triples(path)
        assert [t.to_json() for t in again] == [t.to_json() for t in triples]

    def test_graphs_nonempty(self, tiny_triples):
        for t in tiny_triples:
            assert t.graph.n_points >= 1
            assert t.graph.features.shape[0] == t.graph.coords.shape[0]
