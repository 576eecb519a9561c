"""Shared fixtures: a seeded corpus of random weighted systems and the corpus measures."""

from __future__ import annotations

import numpy as np
import pytest

from src.data.measures import common_belief, penrose_banzhaf, shapley_shubik, unanimity
from src.data.systems import WeightedVotingSystem


def random_systems(count: int, max_voters: int, seed: int) -> list[WeightedVotingSystem]:
    """Integer weights 0-9 (positive total) with a random integer quota in [1, total]."""
    rng = np.random.default_rng(seed)
    systems = []
    while len(systems) < count:
        n = int(rng.integers(1, max_voters + 1))
        weights = rng.integers(0, 10, size=n).tolist()
        total = sum(weights)
        if total == 0:
            continue
        quota = int(rng.integers(1, total + 1))
        systems.append(WeightedVotingSystem(tuple(weights), quota))
    return systems


def mixture_measure():
    """1/2 uniform on [0, 1] + 1/4 at 3/10 + 1/4 at 7/10."""
    return common_belief(
        atoms=[("3/10", "1/4"), ("7/10", "1/4")],
        segments=[(0, 1, "1/2")],
        name="uniform-plus-atoms",
    )


CORPUS_MEASURES = {
    "penrose-banzhaf": penrose_banzhaf,
    "shapley-shubik": shapley_shubik,
    "unanimity": unanimity,
    "uniform-plus-atoms": mixture_measure,
}


@pytest.fixture(scope="session")
def small_corpus() -> list[WeightedVotingSystem]:
    return random_systems(100, max_voters=12, seed=2024)


@pytest.fixture(scope="session")
def oracle_corpus() -> list[WeightedVotingSystem]:
    return random_systems(200, max_voters=16, seed=7)


@pytest.fixture(params=sorted(CORPUS_MEASURES))
def corpus_measure(request):
    return CORPUS_MEASURES[request.param]()


@pytest.fixture
def mixture():
    return mixture_measure()
