"""Iterated deletion of unattractive alternatives.

A vertex with no vertical arc out is the column's favourite worker, so the
worker never ends up anywhere it likes less; symmetrically a vertex with no
horizontal arc out removes the worse workers of its column. Repeating this
until nothing changes gives the normal form.
"""
from collections import deque
from random import Random
from typing import FrozenSet, Iterable, Optional, Tuple
import logging

from app.models.digraph import MatchingDigraph, NormalForm
from app.models.schemas import Matching, RuralHospitalsReport, SplitInstance, Vertex

logger = logging.getLogger(__name__)

_ROW = 0
_COL = 1


def apply_r(digraph: MatchingDigraph) -> Tuple[MatchingDigraph, int]:
    """One synchronous pass of the reduction operator.

    Pivots are collected on the current digraph before anything is deleted.
    """
    column_pivots = [(digraph.best_row(c), c) for c in digraph.nonempty_cols()]
    row_pivots = [(r, digraph.best_col(r)) for r in digraph.nonempty_rows()]
    deleted = 0
    for v in column_pivots:
        deleted += len(digraph.delete_worse_in_row(v))
    for v in row_pivots:
        deleted += len(digraph.delete_worse_in_col(v))
    return digraph, deleted


def reduce_in_place(
    digraph: MatchingDigraph,
    rows: Optional[Iterable[int]] = None,
    cols: Optional[Iterable[int]] = None,
    rng: Optional[Random] = None,
) -> int:
    """Worklist form of the fixpoint iteration; returns the number of deletions.

    Without seeds every row and column is examined. After a single external
    deletion it is enough to seed that vertex's row and column: only their
    pivots can have moved. ``rng`` randomizes the processing order.
    """
    if rows is None and cols is None:
        rows, cols = range(digraph.rows), range(digraph.cols)
    work = deque([(_ROW, r) for r in rows or ()] + [(_COL, c) for c in cols or ()])
    queued = set(work)
    deleted = 0
    while work:
        if rng is not None:
            k = rng.randrange(len(work))
            work.rotate(-k)
        item = work.popleft()
        queued.discard(item)
        kind, index = item
        if kind == _ROW:
            c = digraph.best_col(index)
            if c is None:
                continue
            removed = digraph.delete_worse_in_col((index, c))
        else:
            r = digraph.best_row(index)
            if r is None:
                continue
            removed = digraph.delete_worse_in_row((r, index))
        deleted += len(removed)
        for r2, c2 in removed:
            for entry in ((_ROW, r2), (_COL, c2)):
                if entry not in queued:
                    queued.add(entry)
                    work.append(entry)
    return deleted


def normal_form_of(digraph: MatchingDigraph) -> NormalForm:
    """Wrap an already reduced digraph with its matched rows and columns."""
    rows = tuple(digraph.nonempty_rows())
    cols = tuple(digraph.nonempty_cols())
    return NormalForm(digraph=digraph, r=len(rows), matched_rows=rows, matched_cols=cols)


def run_idua(digraph: MatchingDigraph, rng: Optional[Random] = None) -> NormalForm:
    """Reduce ``digraph`` in place to its normal form."""
    before = digraph.live_count
    deleted = reduce_in_place(digraph, rng=rng)
    nf = normal_form_of(digraph)
    logger.info(
        f"Normal form: {digraph.live_count} of {before} vertices survive ({deleted} deleted), r={nf.r}"
    )
    return nf


def extremal_vertices(digraph: MatchingDigraph) -> Tuple[FrozenSet[Vertex], FrozenSet[Vertex]]:
    """Zero horizontal out-degree vertices and zero vertical out-degree vertices."""
    m_w = frozenset((r, digraph.best_col(r)) for r in digraph.nonempty_rows())
    m_f = frozenset((digraph.best_row(c), c) for c in digraph.nonempty_cols())
    return m_w, m_f


def extremal_matchings(nf: NormalForm) -> Tuple[Matching, Matching]:
    """Worker-optimal and firm-optimal stable matchings of the normal form."""
    m_w, m_f = extremal_vertices(nf.digraph)
    return Matching(pairs=m_w), Matching(pairs=m_f)


def rural_hospitals_report(nf: NormalForm, split: SplitInstance) -> RuralHospitalsReport:
    """Participants whose fate is the same in every stable matching."""
    digraph = nf.digraph
    inst = split.base
    m_w, m_f = extremal_vertices(digraph)
    fixed = sorted(m_w & m_f)

    empty_cols = [c for c in range(digraph.cols) if digraph.col_is_empty(c)]
    filled_cols = [c for c in range(digraph.cols) if not digraph.col_is_empty(c)]

    fixed_firms = []
    for firm in inst.firm_names:
        surviving = [c for c in split.columns_of(firm) if not digraph.col_is_empty(c)]
        if surviving and all((digraph.best_row(c), c) in m_w for c in surviving):
            fixed_firms.append(firm)

    return RuralHospitalsReport(
        never_employed=tuple(inst.workers[r] for r in range(digraph.rows) if digraph.row_is_empty(r)),
        never_filled=tuple(split.column_label(c) for c in empty_cols),
        always_filled=tuple(split.column_label(c) for c in filled_cols),
        underfilled_firms=tuple(sorted({split.columns[c].firm for c in empty_cols}, key=inst.firm_index)),
        fixed_pairs=tuple((inst.workers[r], split.columns[c].firm) for r, c in fixed),
        fixed_firms=tuple(fixed_firms),
    )
