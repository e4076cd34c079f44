"""Firm splitting and compilation of assignment constraints to vertex sets."""
from typing import Dict, List, Set
import logging

from app.models.digraph import MatchingDigraph
from app.models.schemas import (
    AssignmentConstraints,
    Column,
    ConstraintReduction,
    Instance,
    ManyToOneMatching,
    Matching,
    PairConstraints,
    SplitInstance,
    Verdict,
    Vertex,
)
from app.services.market_service import validate_constraints

logger = logging.getLogger(__name__)


def split_firms(inst: Instance) -> SplitInstance:
    """One column per position; every worker ranks copies of a firm in copy order."""
    columns: List[Column] = []
    firm_columns: Dict[str, List[int]] = {}
    for firm in inst.firms:
        for k in range(1, firm.quota + 1):
            firm_columns.setdefault(firm.name, []).append(len(columns))
            columns.append(Column(firm=firm.name, copy_index=k))

    column_prefs = tuple(
        tuple(inst.worker_index(w) for w in inst.firm_prefs[column.firm])
        for column in columns
    )
    worker_prefs_expanded = tuple(
        tuple(c for f in inst.worker_prefs[w] for c in firm_columns[f])
        for w in inst.workers
    )
    return SplitInstance(
        base=inst,
        columns=tuple(columns),
        column_prefs=column_prefs,
        worker_prefs_expanded=worker_prefs_expanded,
    )


def merge_matching(split: SplitInstance, matching: Matching) -> ManyToOneMatching:
    """Collapse firm copies back to their firm."""
    return ManyToOneMatching.of(
        (split.base.workers[r], split.columns[c].firm) for r, c in matching.pairs
    )


def split_matching(split: SplitInstance, mu: ManyToOneMatching) -> Matching:
    """Stable preimage of ``mu``: a firm's workers fill its copies best first."""
    inst = split.base
    pairs = []
    for firm in inst.firm_names:
        workers = sorted(mu.workers_of(firm), key=lambda w: inst.firm_rank(firm, w))
        copies = split.columns_of(firm)
        for w, c in zip(workers, copies):
            pairs.append((inst.worker_index(w), c))
    return Matching.of(pairs)


def _infeasible(reason: str, dropped: List[str]) -> ConstraintReduction:
    logger.info(f"Constraints infeasible: {reason}")
    return ConstraintReduction(
        dropped_redundant=tuple(dropped),
        verdict=Verdict.INFEASIBLE,
        reason=reason,
    )


def reduce_constraints(
    split: SplitInstance,
    normal_form: MatchingDigraph,
    ac: AssignmentConstraints,
) -> ConstraintReduction:
    """Compile assignment constraints against the normal form.

    Vertices absent from the normal form are in no stable matching, so
    forbidding them is redundant and requiring them is infeasible.
    """
    inst = split.base
    validate_constraints(inst, ac)

    contradictions = ac.contradictions()
    if contradictions:
        return _infeasible("infeasible by contradiction: " + "; ".join(contradictions), [])

    v_in: Set[Vertex] = set()
    v_out: Set[Vertex] = set()
    dropped: List[str] = []

    for w, firms in sorted(ac.f_out.items()):
        r = inst.worker_index(w)
        for f in sorted(firms):
            live = [(r, c) for c in split.columns_of(f) if normal_form.is_live((r, c))]
            if live:
                v_out.update(live)
            else:
                dropped.append(f"f_out {w}: {f}")

    for f, workers in sorted(ac.w_out.items()):
        for w in sorted(workers):
            r = inst.worker_index(w)
            live = [(r, c) for c in split.columns_of(f) if normal_form.is_live((r, c))]
            if live:
                v_out.update(live)
            else:
                dropped.append(f"w_out {f}: {w}")

    for w, firms in sorted(ac.f_in.items()):
        if not firms:
            continue
        r = inst.worker_index(w)
        row = normal_form.row_live(r)
        if not row:
            return _infeasible(
                f"worker {w} is never employed in a stable matching, "
                f"so it cannot be employed at {', '.join(sorted(firms))}",
                dropped,
            )
        surviving = set()
        for f in sorted(firms):
            if any(normal_form.is_live((r, c)) for c in split.columns_of(f)):
                surviving.add(f)
            else:
                dropped.append(f"f_in {w}: {f}")
        if not surviving:
            return _infeasible(
                f"worker {w} is employed at none of {', '.join(sorted(firms))} in any stable matching",
                dropped,
            )
        allowed = [c for c in row if split.columns[c].firm in surviving]
        if len(allowed) == 1:
            v_in.add((r, allowed[0]))
        else:
            v_out.update((r, c) for c in row if split.columns[c].firm not in surviving)

    for f, workers in sorted(ac.w_in.items()):
        if not workers:
            continue
        allowed_rows = {inst.worker_index(w) for w in workers}
        for w in sorted(workers):
            r = inst.worker_index(w)
            if not any(normal_form.is_live((r, c)) for c in split.columns_of(f)):
                dropped.append(f"w_in {f}: {w}")
        for c in split.columns_of(f):
            col = normal_form.col_live(c)
            if not col:
                continue
            allowed = [r for r in col if r in allowed_rows]
            if len(allowed) == 1:
                v_in.add((allowed[0], c))
            else:
                # With no allowed row left the column stays unfillable and the
                # search finds no matching of full size.
                v_out.update((r, c) for r in col if r not in allowed_rows)

    overlap = v_in & v_out
    if overlap:
        labels = ", ".join(split.vertex_label(v) for v in sorted(overlap))
        return _infeasible(f"constraints both require and forbid {labels}", dropped)
    for axis, name in ((0, "worker"), (1, "position")):
        seen: Dict[int, Vertex] = {}
        for v in sorted(v_in):
            if v[axis] in seen:
                return _infeasible(
                    f"constraints require both {split.vertex_label(seen[v[axis]])} and "
                    f"{split.vertex_label(v)}, which share a {name}",
                    dropped,
                )
            seen[v[axis]] = v

    if dropped:
        logger.warning(f"Dropped {len(dropped)} redundant constraints: {', '.join(dropped)}")
    reduction = ConstraintReduction(
        pair_constraints=PairConstraints(v_in=frozenset(v_in), v_out=frozenset(v_out)),
        dropped_redundant=tuple(dropped),
    )
    logger.info(f"Constraints compiled to {len(v_in)} forced and {len(v_out)} forbidden vertices")
    return reduction
