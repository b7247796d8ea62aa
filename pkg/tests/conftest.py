"""Shared fixtures: bundled corpus paths and small trained vocabularies."""

import math
from pathlib import Path

import pytest

from boundkit import MarkingScheme, Piece, TrainerConfig, Vocabulary, train

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    assert DATA_DIR.is_dir(), "bundled corpus missing; run scripts/make_corpus.py"
    return DATA_DIR


@pytest.fixture(scope="session")
def train_lines(data_dir) -> list[str]:
    return (data_dir / "train.txt").read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def indomain_lines(data_dir) -> list[str]:
    return (data_dir / "indomain.txt").read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def ood_lines(data_dir) -> list[str]:
    return (data_dir / "ood.txt").read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def tiny_lines(indomain_lines) -> list[str]:
    return indomain_lines[:300]


@pytest.fixture(scope="session")
def tiny_init_vocab(tiny_lines) -> Vocabulary:
    config = TrainerConfig(target_vocab_size=400, scheme=MarkingScheme.INIT)
    return train(tiny_lines, config)


@pytest.fixture(scope="session")
def tiny_fin_vocab(tiny_lines) -> Vocabulary:
    config = TrainerConfig(target_vocab_size=400, scheme=MarkingScheme.FIN)
    return train(tiny_lines, config)


def make_vocab(score_map: dict[str, float],
               scheme: MarkingScheme = MarkingScheme.INIT,
               meta: str = "▁") -> Vocabulary:
    """Hand-built vocabulary from a surface -> score map."""
    return Vocabulary([Piece(s, sc) for s, sc in score_map.items()], scheme,
                      meta)


def prob_vocab(prob_map: dict[str, float],
               scheme: MarkingScheme = MarkingScheme.INIT) -> Vocabulary:
    """Hand-built vocabulary from probabilities."""
    return make_vocab({s: math.log(p) for s, p in prob_map.items()}, scheme)
