"""Bundled reagent catalog and reaction template tables."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def catalog_path() -> Path:
    return Path(str(resources.files(__name__) / "building_blocks.tsv"))


def templates_path() -> Path:
    return Path(str(resources.files(__name__) / "reaction_templates.tsv"))
