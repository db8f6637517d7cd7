"""Shared fixtures: bundled assets plus a small trained checkpoint.

The trained model is session-scoped and built lazily, so fast test files
never pay for it.
"""

from __future__ import annotations

import pytest

from pharmtree.data import catalog_path, templates_path
from pharmtree.synthesis.catalog import load_catalog, load_templates
from pharmtree.synthesis.dataset import make_dataset
from pharmtree.training import TrainConfig, train


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(catalog_path())


@pytest.fixture(scope="session")
def templates():
    return load_templates(templates_path())


@pytest.fixture(scope="session")
def tiny_triples(catalog, templates):
    return list(make_dataset(catalog, templates, n=8, max_depth=3, seed=11))


@pytest.fixture(scope="session")
def tiny_model(catalog, templates, tiny_triples):
    """Small overfit model: enough signal for wiring tests, not accuracy."""
    cfg = TrainConfig(epochs=60, batch_size=4, seed=1)
    ckpt, metrics = train(tiny_triples, catalog, templates, cfg)
    return ckpt, metrics
