"""Instance families: the block market with exponentially many stable matchings, and random markets."""
from random import Random
from typing import Dict, List
import logging

from app.models.schemas import AssignmentConstraints, Firm, Instance, PairConstraints, SplitInstance
from app.services.market_service import validate_instance

logger = logging.getLogger(__name__)


def generate_block_market(n: int) -> Instance:
    """``n/2`` independent 2x2 blocks, each with two stable matchings.

    In a block the workers want their own-index firm first while each firm
    wants the other worker first, so both diagonals are stable and the
    market has ``2 ** (n // 2)`` stable matchings.
    """
    if n < 4 or n % 2:
        raise ValueError(f"n must be an even number of at least 4, got {n}")
    workers = [f"w{k}" for k in range(1, n + 1)]
    firms = [f"f{k}" for k in range(1, n + 1)]
    worker_prefs: Dict[str, List[str]] = {}
    firm_prefs: Dict[str, List[str]] = {}
    for b in range(0, n, 2):
        a, z = b, b + 1
        worker_prefs[workers[a]] = [firms[a], firms[z]]
        worker_prefs[workers[z]] = [firms[z], firms[a]]
        firm_prefs[firms[a]] = [workers[z], workers[a]]
        firm_prefs[firms[z]] = [workers[a], workers[z]]
    return validate_instance({
        "workers": workers,
        "firms": [{"name": f, "quota": 1} for f in firms],
        "worker_prefs": worker_prefs,
        "firm_prefs": firm_prefs,
    })


def forbid_diagonal(n: int, start: int) -> AssignmentConstraints:
    """Forbid ``(w_k, f_k)`` for every ``k`` from ``start`` to ``n`` (1-based)."""
    if start < 1:
        raise ValueError(f"start must be at least 1, got {start}")
    return AssignmentConstraints(
        f_out={f"w{k}": frozenset({f"f{k}"}) for k in range(start, n + 1)},
    )


def forbid_diagonal_pairs(n: int, start: int) -> PairConstraints:
    """Vertex form of ``forbid_diagonal`` for the quota-one block market."""
    return PairConstraints(v_out=frozenset((k - 1, k - 1) for k in range(start, n + 1)))


def generate_random_instance(
    rng: Random,
    max_workers: int = 6,
    max_positions: int = 6,
    density: float = 0.6,
) -> Instance:
    """Random market with truncated, mutually consistent preference lists.

    Every worker and every firm ends up with at least one acceptable partner.
    """
    if max_workers < 1 or max_positions < 1:
        raise ValueError("a random market needs at least one worker and one position")
    m = rng.randint(1, max_workers)
    positions = rng.randint(1, max_positions)
    n = rng.randint(1, positions)
    quotas = [1] * n
    for _ in range(positions - n):
        quotas[rng.randrange(n)] += 1

    workers = [f"w{k}" for k in range(1, m + 1)]
    firms = [f"f{k}" for k in range(1, n + 1)]
    acceptable = {(w, f) for w in workers for f in firms if rng.random() < density}
    for w in workers:
        if not any((w, f) in acceptable for f in firms):
            acceptable.add((w, rng.choice(firms)))
    for f in firms:
        if not any((w, f) in acceptable for w in workers):
            acceptable.add((rng.choice(workers), f))

    worker_prefs = {}
    for w in workers:
        listed = [f for f in firms if (w, f) in acceptable]
        rng.shuffle(listed)
        worker_prefs[w] = listed
    firm_prefs = {}
    for f in firms:
        listed = [w for w in workers if (w, f) in acceptable]
        rng.shuffle(listed)
        firm_prefs[f] = listed

    return validate_instance({
        "workers": workers,
        "firms": [Firm(name=f, quota=q) for f, q in zip(firms, quotas)],
        "worker_prefs": worker_prefs,
        "firm_prefs": firm_prefs,
    })


def random_pair_constraints(
    rng: Random,
    split: SplitInstance,
    max_in: int = 1,
    max_out: int = 4,
) -> PairConstraints:
    """Forced and forbidden vertices drawn from the acceptable pairs of ``split``."""
    vertices = sorted((r, c) for r, prefs in enumerate(split.worker_prefs_expanded) for c in prefs)
    v_in = set()
    if vertices and max_in:
        for v in rng.sample(vertices, rng.randint(0, min(max_in, len(vertices)))):
            if all(v[0] != u[0] and v[1] != u[1] for u in v_in):
                v_in.add(v)
    rest = [v for v in vertices if v not in v_in]
    v_out = set(rng.sample(rest, rng.randint(0, min(max_out, len(rest))))) if rest else set()
    return PairConstraints(v_in=frozenset(v_in), v_out=frozenset(v_out))


def random_assignment_constraints(rng: Random, inst: Instance, max_entries: int = 3) -> AssignmentConstraints:
    """Required and forbidden partner sets drawn from acceptable partners.

    A member is never both required and forbidden for the same participant.
    """
    tables: Dict[str, Dict[str, set]] = {"f_in": {}, "f_out": {}, "w_in": {}, "w_out": {}}
    for _ in range(rng.randint(0, max_entries)):
        key = rng.choice(sorted(tables))
        if key.startswith("f_"):
            owner = rng.choice(list(inst.workers))
            pool = list(inst.worker_prefs[owner])
        else:
            owner = rng.choice(list(inst.firm_names))
            pool = list(inst.firm_prefs[owner])
        opposite = key[:2] + ("out" if key.endswith("in") else "in")
        members = set(rng.sample(pool, rng.randint(1, len(pool)))) - tables[opposite].get(owner, set())
        if members:
            tables[key].setdefault(owner, set()).update(members)
    return AssignmentConstraints(**{
        key: {owner: frozenset(members) for owner, members in table.items()}
        for key, table in tables.items()
    })


def random_seeded_instance(seed: int, max_workers: int = 6, max_positions: int = 6) -> Instance:
    instance = generate_random_instance(Random(seed), max_workers, max_positions)
    logger.debug(f"Random instance from seed {seed}: {instance.m} workers, {instance.total_positions} positions")
    return instance
