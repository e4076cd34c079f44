"""Seeded property checks of the enumerator against the brute-force oracle."""
from random import Random
import time

import numpy as np
import pytest

from app.models.digraph import build_digraph
from app.services.enumeration_service import enumerate_pairs, enumerate_stable
from app.services.generator_service import (
    forbid_diagonal_pairs,
    generate_block_market,
    generate_random_instance,
    random_assignment_constraints,
    random_pair_constraints,
)
from app.services.idua_service import run_idua
from app.services.oracle_service import brute_force_stable, filter_by_constraints
from app.services.reduction_service import split_firms


def check_against_oracle(seed):
    rng = Random(seed)
    inst = generate_random_instance(rng, max_workers=6, max_positions=6)
    split = split_firms(inst)
    pc = random_pair_constraints(rng, split, max_in=1, max_out=4)

    stream = enumerate_pairs(split, pc, normal_form=run_idua(build_digraph(split)))
    expected = {m.pairs for m in filter_by_constraints(brute_force_stable(inst), pc).matchings}
    found = [m.pairs for m in stream.matchings]

    assert len(found) == len(set(found)), f"seed {seed}: duplicate solutions"
    assert set(found) == expected, f"seed {seed}: enumerator and oracle disagree"
    assert stream.stats.call_count <= 2 * len(found) + 1, f"seed {seed}: too many calls"
    assert all(len(pairs) == stream.r for pairs in found), f"seed {seed}: wrong matching size"


def check_assignment_constraints_against_oracle(seed):
    rng = Random(seed)
    inst = generate_random_instance(rng, max_workers=5, max_positions=6)
    ac = random_assignment_constraints(rng, inst)

    stream = enumerate_stable(inst, ac)
    expected = set(filter_by_constraints(brute_force_stable(inst), ac).assignments)
    found = stream.assignments

    assert len(found) == len(set(found)), f"seed {seed}: duplicate solutions"
    assert set(found) == expected, f"seed {seed}: enumerator and oracle disagree on {ac}"


class TestOracleEquivalence:
    """Test cases comparing the enumerator with exhaustive search."""

    def test_small_sweep(self):
        """Test a hundred seeded markets with random forced and forbidden vertices."""
        for seed in range(100):
            check_against_oracle(seed)

    @pytest.mark.slow
    def test_full_sweep(self):
        """Test a thousand more seeded markets."""
        for seed in range(100, 1100):
            check_against_oracle(seed)

    def test_assignment_constraint_sweep(self):
        """Test random required and forbidden partner sets against the filtered oracle."""
        for seed in range(200):
            check_assignment_constraints_against_oracle(seed)

    @pytest.mark.slow
    def test_assignment_constraint_full_sweep(self):
        """Test fifteen hundred seeded markets with random assignment constraints."""
        for seed in range(200, 1700):
            check_assignment_constraints_against_oracle(seed)


@pytest.mark.slow
class TestDelayScaling:
    """Test cases for the time between consecutive solutions."""

    def test_delay_grows_polynomially(self):
        """Test the worst delay on the block market grows at most cubically in n."""
        sizes = [8, 16, 32, 64]
        delays = []
        for n in sizes:
            split = split_firms(generate_block_market(n))
            pc = forbid_diagonal_pairs(n, 5)
            best = None
            for _ in range(3):
                started = time.perf_counter()
                stream = enumerate_pairs(split, pc)
                assert time.perf_counter() - started < 10
                assert len(stream.solutions) == 4
                best = stream.stats.max_delay if best is None else min(best, stream.stats.max_delay)
            delays.append(best)
        slope, _ = np.polyfit(np.log(sizes), np.log(delays), 1)
        assert slope <= 3.3
