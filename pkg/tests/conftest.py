from __future__ import annotations

from pathlib import Path

import pytest

from pareval.corpus import load_directions, load_gold, load_ratings

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def toy_corpus():
    return load_gold(DATA_DIR / "gold_toy.json")


@pytest.fixture(scope="session")
def human_ratings():
    directions = load_directions(DATA_DIR / "human_ratings_directions.json")
    return load_ratings(DATA_DIR / "human_ratings.csv", directions)


@pytest.fixture(scope="session")
def leaderboard_scores():
    directions = load_directions(DATA_DIR / "leaderboard_scores_directions.json")
    return load_ratings(DATA_DIR / "leaderboard_scores.csv", directions)
