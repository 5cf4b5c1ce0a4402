"""Shared fixtures: a few small knots and the bundled corpus."""
import os
import random
from pathlib import Path

import pytest

from khtorsion import parse_pd
from khtorsion.errors import InputError
from khtorsion.moves import R1Plus, R2Plus

CORPUS = Path(__file__).parent / "khtorsion" / "corpus"

TREFOIL = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"
FIGURE_EIGHT = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)"

SMALL_PRIMES = (3, 5, 7, 10007)
RANDOM_BASES = ("O(1)", TREFOIL, FIGURE_EIGHT)
RANDOM_MAX_CROSSINGS = 6


def random_diagram(seed: int):
    """(knot, diagram): a small table knot and a copy changed by a few random Reidemeister I and II moves."""
    rng = random.Random(seed)
    base = parse_pd(rng.choice(RANDOM_BASES))
    d = base
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.5:
            move = R1Plus(rng.randint(1, d.arc_count), rng.choice((1, -1)), rng.choice((True, False)))
        else:
            arcs = tuple(sorted(rng.sample(range(1, d.arc_count + 1), 2))) if d.arc_count > 1 else (1, 1)
            move = R2Plus(arcs, rng.choice(arcs))
        try:
            candidate = move.apply(d).target
        except InputError:
            continue
        if len(candidate.crossings) <= RANDOM_MAX_CROSSINGS:
            d = candidate
    return base, d.with_basepoint(rng.randint(1, d.arc_count))


@pytest.fixture
def corpus() -> Path:
    return CORPUS


@pytest.fixture
def unknot():
    return parse_pd("O(1)")


@pytest.fixture
def trefoil():
    return parse_pd(TREFOIL)


@pytest.fixture
def figure_eight():
    return parse_pd(FIGURE_EIGHT)


@pytest.fixture
def clean_env(monkeypatch):
    """Drop every KHT_ variable the caller's shell may have set."""
    for name in list(os.environ):
        if name.startswith("KHT_"):
            monkeypatch.delenv(name)
    return monkeypatch
