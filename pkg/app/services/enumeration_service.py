"""Enumeration of the stable matchings that respect forced and forbidden vertices.

The search works on the normal form. Each node marks its forced vertices and
everything that shares a line with them as forbidden, deletes forbidden
vertices only once nothing in their row or column is preferred to them, and
then either reports the unique remaining stable matching or branches on a
vertex of the worker-optimal matching that the firm-optimal one lacks.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Set, Union
import logging
import threading
import time

from app.core.exceptions import DigraphContractError
from app.models.digraph import FLAG_IN, FLAG_OUT, MatchingDigraph, NormalForm, SearchNode, build_digraph
from app.models.schemas import (
    AssignmentConstraints,
    EnumerationMode,
    Instance,
    Matching,
    PairConstraints,
    Solution,
    SolutionStream,
    SplitInstance,
    Verdict,
    Vertex,
)
from app.services.idua_service import extremal_vertices, reduce_in_place, run_idua
from app.services.reduction_service import merge_matching, reduce_constraints, split_firms

logger = logging.getLogger(__name__)

SolutionCallback = Callable[[Solution], None]


class StopEnumeration(Exception):
    """Raised internally once no further solutions are wanted."""


def pick_branch_vertex(m_w: Iterable[Vertex], m_f: Iterable[Vertex]) -> Vertex:
    """Smallest row, then smallest column, of the worker-optimal extras."""
    candidates = set(m_w) - set(m_f)
    if not candidates:
        raise DigraphContractError("extremal matchings coincide, nothing to branch on")
    return min(candidates)


class EnumerationRun:
    """Shared state of one enumeration: output stream, counters and stop signal."""

    def __init__(
        self,
        split: SplitInstance,
        r: int,
        mode: EnumerationMode = EnumerationMode.ALL,
        limit: Optional[int] = None,
        on_solution: Optional[SolutionCallback] = None,
    ):
        self.split = split
        self.r = r
        self.mode = EnumerationMode(mode)
        self.limit = limit
        self.on_solution = on_solution
        self.stream = SolutionStream(r=r)
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._last_emit = time.perf_counter()

    @property
    def stopped(self) -> bool:
        return self._stop.is_set()

    def count_call(self, depth: int) -> None:
        with self._lock:
            stats = self.stream.stats
            stats.call_count += 1
            stats.max_depth = max(stats.max_depth, depth)

    def count_deletions(self, n: int) -> None:
        with self._lock:
            self.stream.stats.deletions += n

    def emit(self, pairs: Iterable[Vertex]) -> None:
        with self._lock:
            if self._stop.is_set():
                raise StopEnumeration()
            now = time.perf_counter()
            delay = now - self._last_emit
            self._last_emit = now
            matching = Matching(pairs=frozenset(pairs))
            solution = Solution(
                index=len(self.stream.solutions),
                matching=matching,
                assignment=merge_matching(self.split, matching),
                delay_seconds=delay,
            )
            self.stream.solutions.append(solution)
            self.stream.stats.delays.append(delay)
            logger.debug(f"Solution {solution.index} after {delay:.6f}s")
            if self.on_solution is not None:
                self.on_solution(solution)
            if self.mode != EnumerationMode.ALL:
                self._stop.set()
                raise StopEnumeration()
            if self.limit is not None and len(self.stream.solutions) >= self.limit:
                self.stream.partial = True
                self._stop.set()
                raise StopEnumeration()


def expand_node(node: SearchNode, run: EnumerationRun) -> List[SearchNode]:
    """Run one recursive call on ``node`` and return its children, the forced branch first."""
    run.count_call(node.depth)
    digraph = node.digraph
    v_in = node.v_in

    # A forced vertex lost to an earlier reduction kills the branch
    if any(not digraph.is_live(v) for v in v_in):
        return []
    v_out: Set[Vertex] = set(node.v_out)
    for r, c in v_in:
        v_out.update((r, c2) for c2 in digraph.row_live(r) if c2 != c)
        v_out.update((r2, c) for r2 in digraph.col_live(c) if r2 != r)
    for v in v_in:
        digraph.set_flag(v, FLAG_IN)
    for v in v_out:
        if digraph.is_live(v):
            digraph.set_flag(v, FLAG_OUT)

    # Forbidden vertices go only while they are pointers
    deletions = 0
    while True:
        target = _deletable_out_vertex(digraph)
        if target is None:
            break
        digraph.delete_vertex(target)
        deletions += 1 + reduce_in_place(digraph, rows=[target[0]], cols=[target[1]])
    if deletions:
        run.count_deletions(deletions)
        logger.debug(f"Depth {node.depth}: removed {deletions} vertices, {digraph.live_count} remain")

    # Full size and all forced vertices still present
    m_w, m_f = extremal_vertices(digraph)
    if len(m_w) < run.r or any(not digraph.is_live(v) for v in v_in):
        return []

    if run.mode == EnumerationMode.WORKER_OPTIMAL:
        run.emit(m_w)
    elif run.mode == EnumerationMode.FIRM_OPTIMAL:
        run.emit(m_f)

    # Leaf
    if m_w == m_f:
        run.emit(m_w)
        return []

    # Branch on v: forced in the copy, forbidden in place
    v = pick_branch_vertex(m_w, m_f)
    logger.debug(f"Depth {node.depth}: branching on {v}")
    frozen_out = frozenset(v_out)
    return [
        SearchNode(digraph=digraph.snapshot(), v_in=v_in | {v}, v_out=frozen_out, depth=node.depth + 1),
        SearchNode(digraph=digraph, v_in=v_in, v_out=frozen_out | {v}, depth=node.depth + 1),
    ]


def _deletable_out_vertex(digraph: MatchingDigraph) -> Optional[Vertex]:
    for r in range(digraph.rows):
        c = digraph.best_col(r)
        if c is not None and digraph.flag((r, c)) == FLAG_OUT:
            return r, c
    for c in range(digraph.cols):
        r = digraph.best_row(c)
        if r is not None and digraph.flag((r, c)) == FLAG_OUT:
            return r, c
    return None


def recurse(node: SearchNode, run: EnumerationRun) -> None:
    """Depth-first search below ``node``; solutions go to ``run``."""
    stack = [node]
    while stack:
        if run.stopped:
            return
        children = expand_node(stack.pop(), run)
        stack.extend(reversed(children))


def _recurse_parallel(root: SearchNode, run: EnumerationRun, workers: int) -> None:
    frontier = [root]
    while frontier and len(frontier) < workers:
        expanded: List[SearchNode] = []
        for node in frontier:
            expanded.extend(expand_node(node, run))
        frontier = expanded
    if not frontier:
        return
    logger.debug(f"Searching {len(frontier)} subtrees on {workers} threads")

    def explore(node: SearchNode) -> None:
        try:
            recurse(node, run)
        except StopEnumeration:
            pass

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(explore, frontier))


def enumerate_pairs(
    split: SplitInstance,
    pair_constraints: Optional[PairConstraints] = None,
    mode: Union[EnumerationMode, str] = EnumerationMode.ALL,
    limit: Optional[int] = None,
    on_solution: Optional[SolutionCallback] = None,
    normal_form: Optional[NormalForm] = None,
    parallel: bool = False,
    workers: int = 4,
) -> SolutionStream:
    """Stable matchings of ``split`` containing ``v_in`` and avoiding ``v_out``."""
    if pair_constraints is None:
        pair_constraints = PairConstraints()
    if limit is not None and limit < 1:
        raise ValueError("limit must be at least 1")
    for r, c in pair_constraints.v_in | pair_constraints.v_out:
        if not (0 <= r < split.rows and 0 <= c < split.cols):
            raise DigraphContractError(f"vertex {(r, c)} lies outside the {split.rows}x{split.cols} grid")
    if normal_form is None:
        normal_form = run_idua(build_digraph(split))

    run = EnumerationRun(split, normal_form.r, EnumerationMode(mode), limit, on_solution)
    root = SearchNode(
        digraph=normal_form.digraph.snapshot(),
        v_in=pair_constraints.v_in,
        v_out=pair_constraints.v_out,
    )
    try:
        if parallel and run.mode == EnumerationMode.ALL:
            _recurse_parallel(root, run, max(1, workers))
        else:
            recurse(root, run)
    except StopEnumeration:
        pass

    stream = run.stream
    if parallel:
        stream.solutions.sort(key=lambda s: s.matching.sorted_pairs())
        for i, solution in enumerate(stream.solutions):
            solution.index = i
    logger.info(
        f"Enumeration finished: {len(stream.solutions)} solutions, "
        f"{stream.stats.call_count} calls, {stream.stats.deletions} deletions"
    )
    if stream.partial:
        logger.warning(f"Stopped after {limit} solutions; more may exist")
    return stream


def enumerate_stable(
    inst: Instance,
    ac: Optional[AssignmentConstraints] = None,
    mode: Union[EnumerationMode, str] = EnumerationMode.ALL,
    limit: Optional[int] = None,
    on_solution: Optional[SolutionCallback] = None,
    parallel: bool = False,
    workers: int = 4,
) -> SolutionStream:
    """Split, reduce, compile the constraints and search."""
    if ac is None:
        ac = AssignmentConstraints()
    split = split_firms(inst)
    nf = run_idua(build_digraph(split))
    reduction = reduce_constraints(split, nf.digraph, ac)
    if not reduction.feasible:
        return SolutionStream(
            r=nf.r,
            verdict=Verdict.INFEASIBLE,
            reason=reduction.reason,
            dropped_redundant=reduction.dropped_redundant,
        )
    stream = enumerate_pairs(
        split,
        reduction.pair_constraints,
        mode=mode,
        limit=limit,
        on_solution=on_solution,
        normal_form=nf,
        parallel=parallel,
        workers=workers,
    )
    stream.dropped_redundant = reduction.dropped_redundant
    if not stream.solutions:
        stream.reason = "no stable matching satisfies the constraints"
    return stream


def naive_delete_then_idua(nf: NormalForm, v_out: Iterable[Vertex]) -> Matching:
    """Delete every forbidden vertex up front, reduce, and take the worker-optimal set.

    This ignores whether a forbidden vertex was still needed to block other
    pairs, so its result can be unstable in the original market.
    """
    digraph = nf.digraph.snapshot()
    for v in v_out:
        if digraph.is_live(v):
            digraph.delete_vertex(v)
    reduce_in_place(digraph)
    m_w, _ = extremal_vertices(digraph)
    return Matching(pairs=m_w)


class EnumerationService:
    """Enumerator bound to an execution mode."""

    def __init__(self, parallel: bool = False, workers: int = 4, default_mode: str = "all"):
        self.parallel = parallel
        self.workers = workers
        self.default_mode = EnumerationMode(default_mode)

    def enumerate(
        self,
        inst: Instance,
        ac: Optional[AssignmentConstraints] = None,
        mode: Optional[Union[EnumerationMode, str]] = None,
        limit: Optional[int] = None,
        on_solution: Optional[SolutionCallback] = None,
    ) -> SolutionStream:
        return enumerate_stable(
            inst,
            ac,
            mode=mode or self.default_mode,
            limit=limit,
            on_solution=on_solution,
            parallel=self.parallel,
            workers=self.workers,
        )

    def enumerate_pairs(
        self,
        split: SplitInstance,
        pair_constraints: Optional[PairConstraints] = None,
        mode: Optional[Union[EnumerationMode, str]] = None,
        limit: Optional[int] = None,
        on_solution: Optional[SolutionCallback] = None,
    ) -> SolutionStream:
        return enumerate_pairs(
            split,
            pair_constraints,
            mode=mode or self.default_mode,
            limit=limit,
            on_solution=on_solution,
            parallel=self.parallel,
            workers=self.workers,
        )
