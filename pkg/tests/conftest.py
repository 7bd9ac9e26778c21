"""Shared fixtures: table builders and seeded random generators."""

from __future__ import annotations

import numpy as np
import pytest

from coda_atlas import Entity, Part, validate_table

ROLE_CYCLE = ("financial", "environmental", "social")


def make_table(values, ids=None, sectors=None, part_names=None, units=None):
    """Build a validated table around a raw value matrix with stub metadata."""
    values = np.asarray(values, dtype=float)
    n, D = values.shape
    if ids is None:
        ids = [f"e{r:02d}" for r in range(n)]
    if sectors is None:
        sectors = ["101X"] * n
    if part_names is None:
        part_names = [f"part_{d}" for d in range(D)]
    if units is None:
        units = ["unitless"] * D
    parts = [
        Part(index=d, name=part_names[d], unit=units[d], role=ROLE_CYCLE[d % 3])
        for d in range(D)
    ]
    entities = [
        Entity(id=ids[r], label=f"Entity {ids[r]}", sector_code=sectors[r])
        for r in range(n)
    ]
    return validate_table(values, parts, entities)


def random_table(rng: np.random.Generator, n: int, D: int):
    """Random positive table with log-uniform values over [1e-3, 1e6]."""
    logs = rng.uniform(np.log(1e-3), np.log(1e6), size=(n, D))
    return make_table(np.exp(logs))


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("CODA_ATLAS_SEED", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)
