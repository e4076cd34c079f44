from random import Random

import pytest

from app.models.digraph import build_digraph
from app.models.schemas import AssignmentConstraints, ManyToOneMatching
from app.services.generator_service import generate_random_instance
from app.services.idua_service import run_idua
from app.services.market_service import validate_instance
from app.services.reduction_service import split_firms

EXAMPLE1 = {
    "workers": ["w1", "w2", "w3", "w4", "w5", "w6"],
    "firms": [
        {"name": "f1", "quota": 1},
        {"name": "f2", "quota": 1},
        {"name": "f3", "quota": 1},
        {"name": "f4", "quota": 2},
    ],
    "worker_prefs": {
        "w1": ["f1", "f2", "f3", "f4"],
        "w2": ["f2", "f1", "f4", "f3"],
        "w3": ["f3", "f4", "f1", "f2"],
        "w4": ["f4", "f3", "f2", "f1"],
        "w5": ["f4", "f1", "f2", "f3"],
        "w6": ["f2", "f1", "f4"],
    },
    "firm_prefs": {
        "f1": ["w5", "w4", "w3", "w2", "w1", "w6"],
        "f2": ["w3", "w5", "w4", "w1", "w2", "w6"],
        "f3": ["w2", "w1", "w5", "w4", "w3"],
        "f4": ["w5", "w1", "w2", "w3", "w4", "w6"],
    },
}

# Three workers and three firms with cyclic preferences; already reduced.
CYCLIC = {
    "workers": ["w1", "w2", "w3"],
    "firms": [{"name": "f1"}, {"name": "f2"}, {"name": "f3"}],
    "worker_prefs": {
        "w1": ["f3", "f2", "f1"],
        "w2": ["f1", "f3", "f2"],
        "w3": ["f2", "f1", "f3"],
    },
    "firm_prefs": {
        "f1": ["w1", "w3", "w2"],
        "f2": ["w2", "w1", "w3"],
        "f3": ["w3", "w2", "w1"],
    },
}

EXAMPLE1_TEXT = """\
# Six workers, four firms; f4 has two positions
[workers]
w1 w2 w3 w4 w5 w6
[firms]
f1
f2
f3
f4 2
[worker_prefs]
w1: f1 f2 f3 f4
w2: f2 f1 f4 f3
w3: f3 f4 f1 f2
w4: f4 f3 f2 f1
w5: f4 f1 f2 f3
w6: f2 f1 f4
[firm_prefs]
f1: w5 w4 w3 w2 w1 w6
f2: w3 w5 w4 w1 w2 w6
f3: w2 w1 w5 w4 w3
f4: w5 w1 w2 w3 w4 w6
[constraints]
w_out f1: w4
w_in f2: w1 w6
w_out f4: w6
"""


def one_based(*pairs):
    """Vertices written the way markets are usually drawn, converted to grid indices."""
    return frozenset((r - 1, c - 1) for r, c in pairs)


def assignment(*pairs):
    return ManyToOneMatching.of(pairs)


MU_STAR = [
    assignment(("w1", "f2"), ("w2", "f1"), ("w3", "f3"), ("w4", "f4"), ("w5", "f4")),
    assignment(("w1", "f2"), ("w2", "f1"), ("w3", "f4"), ("w4", "f3"), ("w5", "f4")),
    assignment(("w1", "f2"), ("w2", "f4"), ("w3", "f1"), ("w4", "f3"), ("w5", "f4")),
]

M_STAR = [
    one_based((1, 2), (2, 1), (3, 3), (4, 5), (5, 4)),
    one_based((1, 2), (2, 1), (3, 5), (4, 3), (5, 4)),
    one_based((1, 2), (2, 5), (3, 1), (4, 3), (5, 4)),
]


@pytest.fixture
def example1():
    """Six-worker market with one two-position firm."""
    return validate_instance(EXAMPLE1)


@pytest.fixture
def question1():
    """Keep w4 out of f1, fill f2 from {w1, w6}, keep w6 out of f4."""
    return AssignmentConstraints(
        w_out={"f1": frozenset({"w4"}), "f4": frozenset({"w6"})},
        w_in={"f2": frozenset({"w1", "w6"})},
    )


@pytest.fixture
def example1_split(example1):
    return split_firms(example1)


@pytest.fixture
def example1_nf(example1_split):
    return run_idua(build_digraph(example1_split))


@pytest.fixture
def cyclic():
    return validate_instance(CYCLIC)


@pytest.fixture
def cyclic_split(cyclic):
    return split_firms(cyclic)


@pytest.fixture
def example1_file(tmp_path):
    path = tmp_path / "example1.txt"
    path.write_text(EXAMPLE1_TEXT)
    return path


@pytest.fixture
def random_markets():
    """Seeded stream of small random markets."""
    def make(count, seed=20240601, max_workers=6, max_positions=6):
        rng = Random(seed)
        return [generate_random_instance(rng, max_workers, max_positions) for _ in range(count)]
    return make
