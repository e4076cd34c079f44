"""Exhaustive ground truth for small markets.

Everything here is independent of the normal form: stable matchings are
generated straight from the blocking-pair definition, kernels straight from
the arc definition, and deferred acceptance is the textbook proposal loop.
"""
from math import prod
from typing import List, Optional, Sequence, Tuple, Union
import logging

from app.core.config import settings
from app.core.exceptions import OracleBoundExceeded
from app.models.digraph import MatchingDigraph
from app.models.schemas import (
    AssignmentConstraints,
    Instance,
    ManyToOneMatching,
    Matching,
    OracleResult,
    PairConstraints,
    SplitInstance,
)
from app.services.market_service import satisfies_constraints
from app.services.reduction_service import split_firms, split_matching

logger = logging.getLogger(__name__)


def _check_bound(estimate: int, bound: int) -> None:
    if estimate > bound:
        logger.warning(f"Oracle refused: {estimate} candidates exceed bound {bound}")
        raise OracleBoundExceeded(estimate, bound)


def search_space_estimate(inst: Instance) -> int:
    """Number of ways to give every worker a listed firm or nothing."""
    return prod(len(inst.worker_prefs[w]) + 1 for w in inst.workers)


def brute_force_stable(inst: Instance, max_candidates: Optional[int] = None) -> OracleResult:
    """All stable many-to-one matchings by row-wise generation.

    Workers are assigned in order. Once every worker on a firm's list has
    been decided the firm's pairs are checked for blocking, so hopeless
    branches are cut early.
    """
    bound = settings.oracle_max_candidates if max_candidates is None else max_candidates
    _check_bound(search_space_estimate(inst), bound)

    m, n = inst.m, inst.n
    firms = inst.firm_names
    choices = [[inst.firm_index(f) for f in inst.worker_prefs[w]] for w in inst.workers]
    wrank = [{inst.firm_index(f): k for k, f in enumerate(inst.worker_prefs[w])} for w in inst.workers]
    flist = [[inst.worker_index(w) for w in inst.firm_prefs[f]] for f in firms]
    frank = [{inst.worker_index(w): k for k, w in enumerate(inst.firm_prefs[f])} for f in firms]
    quota = [inst.quota(f) for f in firms]

    completes_at: List[List[int]] = [[] for _ in range(m)]
    for j in range(n):
        completes_at[max(flist[j])].append(j)

    assign = [-1] * m
    members: List[List[int]] = [[] for _ in range(n)]
    found: List[ManyToOneMatching] = []
    examined = 0

    def firm_blocked(j: int) -> bool:
        full = len(members[j]) >= quota[j]
        worst = max((frank[j][i] for i in members[j]), default=-1)
        for i in flist[j]:
            current = assign[i]
            if current == j:
                continue
            if current != -1 and wrank[i][current] < wrank[i][j]:
                continue
            if not full or frank[j][i] < worst:
                return True
        return False

    def extend(i: int) -> None:
        nonlocal examined
        if i == m:
            examined += 1
            found.append(ManyToOneMatching.of(
                (inst.workers[k], firms[assign[k]]) for k in range(m) if assign[k] != -1
            ))
            return
        for j in choices[i] + [-1]:
            if j != -1:
                if len(members[j]) >= quota[j]:
                    continue
                members[j].append(i)
            assign[i] = j
            if not any(firm_blocked(k) for k in completes_at[i]):
                extend(i + 1)
            assign[i] = -1
            if j != -1:
                members[j].pop()

    extend(0)
    found.sort(key=lambda mu: mu.sorted_pairs())
    split = split_firms(inst)
    matchings = tuple(split_matching(split, mu) for mu in found)
    logger.info(f"Oracle found {len(found)} stable matchings")
    return OracleResult(
        assignments=tuple(found),
        matchings=matchings,
        candidates_examined=examined,
        total_stable=len(found),
        after_filter=len(found),
    )


def _pairs_ok(matching: Matching, pc: PairConstraints) -> bool:
    return pc.v_in <= matching.pairs and not (pc.v_out & matching.pairs)


def filter_by_constraints(
    result: OracleResult,
    constraints: Union[AssignmentConstraints, PairConstraints],
) -> OracleResult:
    """Keep the members that satisfy ``constraints``, checked on each member directly."""
    if isinstance(constraints, PairConstraints):
        keep = [k for k, matching in enumerate(result.matchings) if _pairs_ok(matching, constraints)]
    else:
        keep = [k for k, mu in enumerate(result.assignments) if satisfies_constraints(mu, constraints)]
    return OracleResult(
        assignments=tuple(result.assignments[k] for k in keep),
        matchings=tuple(result.matchings[k] for k in keep),
        candidates_examined=result.candidates_examined,
        total_stable=result.total_stable,
        after_filter=len(keep),
    )


def brute_force_stable_digraph(digraph: MatchingDigraph, max_candidates: Optional[int] = None) -> List[Matching]:
    """All kernels: independent vertex sets every other live vertex points into."""
    bound = settings.oracle_max_candidates if max_candidates is None else max_candidates
    rows = [digraph.row_live(r) for r in range(digraph.rows)]
    cols = [digraph.col_live(c) for c in range(digraph.cols)]
    _check_bound(prod(len(row) + 1 for row in rows), bound)

    completes_at: List[List[int]] = [[] for _ in range(digraph.rows)]
    for c, col in enumerate(cols):
        if col:
            completes_at[max(col)].append(c)

    row_rank = digraph.row_rank
    col_rank = digraph.col_rank
    chosen_col = [-1] * digraph.rows
    chosen_row = [-1] * digraph.cols
    kernels: List[Matching] = []

    def absorbed(c: int) -> bool:
        # Every live vertex of column c is in the set or has an arc into it.
        holder = chosen_row[c]
        for r in cols[c]:
            if r == holder:
                continue
            if holder != -1 and col_rank[holder, c] < col_rank[r, c]:
                continue
            own = chosen_col[r]
            if own != -1 and row_rank[r, own] < row_rank[r, c]:
                continue
            return False
        return True

    def extend(r: int) -> None:
        if r == digraph.rows:
            kernels.append(Matching.of((i, chosen_col[i]) for i in range(digraph.rows) if chosen_col[i] != -1))
            return
        for c in rows[r] + [-1]:
            if c != -1:
                if chosen_row[c] != -1:
                    continue
                chosen_row[c] = r
            chosen_col[r] = c
            if all(absorbed(k) for k in completes_at[r]):
                extend(r + 1)
            chosen_col[r] = -1
            if c != -1:
                chosen_row[c] = -1

    extend(0)
    kernels.sort(key=lambda k: k.sorted_pairs())
    return kernels


def deferred_acceptance(split: SplitInstance, proposers: str = "workers") -> Matching:
    """Proposer-optimal stable matching of the split market."""
    if proposers not in ("workers", "firms"):
        raise ValueError("proposers must be 'workers' or 'firms'")
    if proposers == "workers":
        lists: Sequence[Tuple[int, ...]] = split.worker_prefs_expanded
        receiver_lists: Sequence[Tuple[int, ...]] = split.column_prefs
    else:
        lists = split.column_prefs
        receiver_lists = split.worker_prefs_expanded
    receiver_rank = [{p: k for k, p in enumerate(prefs)} for prefs in receiver_lists]

    next_choice = [0] * len(lists)
    held: dict = {}
    free = list(range(len(lists)))
    while free:
        p = free.pop()
        prefs = lists[p]
        if next_choice[p] >= len(prefs):
            continue
        target = prefs[next_choice[p]]
        next_choice[p] += 1
        current = held.get(target)
        if current is None:
            held[target] = p
        elif receiver_rank[target][p] < receiver_rank[target][current]:
            held[target] = p
            free.append(current)
        else:
            free.append(p)

    if proposers == "workers":
        return Matching.of((p, target) for target, p in held.items())
    return Matching.of((target, p) for target, p in held.items())


class OracleService:
    """Brute-force oracle with a configured search-space bound."""

    def __init__(self, max_candidates: int):
        self.max_candidates = max_candidates

    def stable_matchings(self, inst: Instance) -> OracleResult:
        return brute_force_stable(inst, self.max_candidates)

    def constrained(self, inst: Instance, constraints: Union[AssignmentConstraints, PairConstraints]) -> OracleResult:
        return filter_by_constraints(self.stable_matchings(inst), constraints)

    def kernels(self, digraph: MatchingDigraph) -> List[Matching]:
        return brute_force_stable_digraph(digraph, self.max_candidates)
