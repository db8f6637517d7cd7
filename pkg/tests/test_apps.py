"""Decoding applications: generation, hit expansion, GA optimization,
and embedding neighborhoods."""

from __future__ import annotations

import pytest
import torch

from pharmtree.apps import (
    GaConfig,
    GenerationConfig,
    InferenceSession,
    Scorer,
    generate,
    hit_expand,
    nearest_blocks,
    optimize,
)
from pharmtree.apps.neighbors import _neighbor_table, nearest_rows
from pharmtree.chem import canonicalize
from pharmtree.chem.props import logp
from pharmtree.errors import DeadEnd, ExtinctPopulation, UnknownBlock
from pharmtree.model import RetrievalIndex
from pharmtree.synthesis import replay
from pharmtree.synthesis.tree import ORDER_SEED


@pytest.fixture(scope="module")
def session(tiny_model, catalog, templates):
    ckpt, _ = tiny_model
    return InferenceSession.open(ckpt, catalog, templates)


class TestGenerate:
    def test_deterministic(self, session, catalog, templates, tiny_triples):
        g = tiny_triples[0].graph
        a = generate(g, session, catalog, templates)
        b = generate(g, session, catalog, templates)
        assert a.to_json() == b.to_json()

    def test_replayable(self, session, catalog, templates, tiny_triples):
        tree = generate(tiny_triples[0].graph, session, catalog, templates)
        assert replay(tree, catalog, templates).smiles == tree.final

    def test_max_steps_bounds_depth(self, session, catalog, templates, tiny_triples):
        tree = generate(
            tiny_triples[1].graph, session, catalog, templates,
            GenerationConfig(max_steps=1),
        )
        assert tree.depth == 1

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GenerationConfig(max_steps=0)


class TestHitExpand:
    SEED = "O=C(O)c1ccc(cc1)NCc1ccc(Cl)cc1"  # carries acid + amine handles
    INERT = "CCN(C)c1ccc(C=NCC(C)C)cc1"      # no template applies to it

    def test_routes_rooted_at_seed(self, session, catalog, templates):
        seed = canonicalize(self.SEED)
        trees = hit_expand(seed, session, catalog, templates, n=3, seed=4)
        assert len(trees) == 3
        for t in trees:
            root = t.steps[0]
            assert root.order == ORDER_SEED
            assert root.block is None
            assert root.smiles == seed.smiles
            assert t.depth >= 2
            assert replay(t, catalog, templates).smiles == t.final

    def test_deterministic(self, session, catalog, templates):
        seed = canonicalize(self.SEED)
        a = hit_expand(seed, session, catalog, templates, n=2, seed=7)
        b = hit_expand(seed, session, catalog, templates, n=2, seed=7)
        assert [t.to_json() for t in a] == [t.to_json() for t in b]

    def test_zero_analogs(self, session, catalog, templates):
        seed = canonicalize(self.SEED)
        assert hit_expand(seed, session, catalog, templates, n=0) == []

    def test_dead_end_for_inert_seed(self, session, catalog, templates):
        seed = canonicalize(self.INERT)
        with pytest.raises(DeadEnd):
            hit_expand(seed, session, catalog, templates, n=1)


class TestOptimize:
    def _seeds(self, session, catalog, templates, tiny_triples, n=4):
        return [t.tree for t in tiny_triples[:n]]

    def test_scores_ranked_descending(self, session, catalog, templates, tiny_triples):
        scorer = Scorer("neg_logp", lambda m: -logp(m.graph))
        pop, events = optimize(
            self._seeds(session, catalog, templates, tiny_triples),
            session, scorer, GaConfig(population=6, cycles=2), seed=3,
        )
        scores = [s for _, s in pop]
        assert scores == sorted(scores, reverse=True)
        assert len(pop) <= 6
        for tree, score in pop:
            assert replay(tree, catalog, templates).smiles == tree.final
            assert score == scorer(canonicalize(tree.final))

    def test_best_monotone_in_cycles(self, session, catalog, templates, tiny_triples):
        # the cycle loop consumes one rng stream, so a shorter run is a
        # prefix of a longer one and elitism makes the best score monotone
        scorer = Scorer("neg_logp", lambda m: -logp(m.graph))
        seeds = self._seeds(session, catalog, templates, tiny_triples)
        bests = []
        for cycles in (1, 2, 3):
            pop, _ = optimize(
                seeds, session, scorer, GaConfig(population=6, cycles=cycles), seed=5,
            )
            bests.append(pop[0][1])
        assert bests[0] <= bests[1] <= bests[2]

    def test_constant_scorer_keeps_population(self, session, catalog, templates, tiny_triples):
        scorer = Scorer("const", lambda m: 1.0)
        pop, _ = optimize(
            self._seeds(session, catalog, templates, tiny_triples),
            session, scorer, GaConfig(population=4, cycles=1), seed=0,
        )
        assert pop and all(s == 1.0 for _, s in pop)

    def test_empty_seeds_extinct(self, session, catalog, templates):
        scorer = Scorer("const", lambda m: 1.0)
        with pytest.raises(ExtinctPopulation):
            optimize([], session, scorer, GaConfig(), seed=0)

    def test_lineage_events(self, session, catalog, templates, tiny_triples):
        scorer = Scorer("neg_logp", lambda m: -logp(m.graph))
        _, events = optimize(
            self._seeds(session, catalog, templates, tiny_triples),
            session, scorer, GaConfig(population=6, cycles=2), seed=3,
        )
        import json

        for e in events:
            assert 0 <= e.cycle < 2
            assert e.new_block != e.old_block or e.mutated_step >= 0
            obj = json.loads(e.to_json())
            assert obj["child_id"] == e.child_id

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GaConfig(population=0)
        with pytest.raises(ValueError):
            GaConfig(cycles=-1)


class TestNeighbors:
    def test_descending_and_query_excluded(self, tiny_model, catalog, templates):
        ckpt, _ = tiny_model
        bid = catalog.blocks[0].id
        rows = nearest_blocks(bid, ckpt, catalog, templates, k=5)
        assert len(rows) == 5
        assert bid not in [b for b, _ in rows]
        cosines = [c for _, c in rows]
        assert cosines == sorted(cosines, reverse=True)

    def test_unknown_block(self, tiny_model, catalog, templates):
        ckpt, _ = tiny_model
        with pytest.raises(UnknownBlock):
            nearest_blocks(10**9, ckpt, catalog, templates, k=3)

    def test_k_zero(self, tiny_model, catalog, templates):
        ckpt, _ = tiny_model
        assert nearest_blocks(catalog.blocks[0].id, ckpt, catalog, templates, k=0) == []

    def test_duplicate_rows_cosine_exactly_one(self):
        zprime = torch.tensor(
            [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]
        )  # last row is END
        index = RetrievalIndex(zprime, [3, 7, 9], "0" * 64)
        table = _neighbor_table(index, 3)
        assert table[0] == (7, 1.0)
        assert nearest_rows(index, 3, 2) == [7, 9]

    def test_matches_session_index(self, session, catalog, templates, tiny_model):
        ckpt, _ = tiny_model
        bid = catalog.blocks[5].id
        via_ckpt = [b for b, _ in nearest_blocks(bid, ckpt, catalog, templates, k=4)]
        assert via_ckpt == nearest_rows(session.index, bid, 4)
