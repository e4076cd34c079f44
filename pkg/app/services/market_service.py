"""Validation and the blocking-pair definition on many-to-one markets."""
from typing import Dict, List, Tuple, Union
import logging

from app.core.exceptions import ConstraintValidationError, InstanceValidationError, InvalidMatchingError
from app.models.schemas import (
    AssignmentConstraints,
    Instance,
    InstanceBase,
    InstanceCreate,
    ManyToOneMatching,
    Violation,
    ViolationKind,
)

logger = logging.getLogger(__name__)


def validate_instance(raw: Union[InstanceBase, dict]) -> Instance:
    """Return a validated ``Instance`` or raise with every violation found."""
    if isinstance(raw, dict):
        raw = InstanceCreate(**raw)
    problems = raw.violations()
    if problems:
        logger.warning(f"Instance rejected with {len(problems)} violations")
        raise InstanceValidationError(problems)
    instance = Instance(
        workers=raw.workers,
        firms=raw.firms,
        worker_prefs=raw.worker_prefs,
        firm_prefs=raw.firm_prefs,
    )
    logger.debug(f"Validated instance with {instance.m} workers and {instance.n} firms")
    return instance


def constraint_violations(inst: Instance, ac: AssignmentConstraints) -> List[Violation]:
    """Unknown participants referenced by assignment constraints."""
    found: List[Violation] = []
    for key, table, own, other in (
        ("f_in", ac.f_in, inst.has_worker, inst.has_firm),
        ("f_out", ac.f_out, inst.has_worker, inst.has_firm),
        ("w_in", ac.w_in, inst.has_firm, inst.has_worker),
        ("w_out", ac.w_out, inst.has_firm, inst.has_worker),
    ):
        for name, members in table.items():
            if not own(name):
                found.append(Violation(
                    kind=ViolationKind.UNKNOWN_PARTICIPANT,
                    participants=(name,),
                    message=f"{key} constraint names unknown participant {name}",
                ))
            for member in sorted(members):
                if not other(member):
                    found.append(Violation(
                        kind=ViolationKind.UNKNOWN_PARTICIPANT,
                        participants=(name, member),
                        message=f"{key} constraint of {name} names unknown participant {member}",
                    ))
    return found


def validate_constraints(inst: Instance, ac: AssignmentConstraints) -> AssignmentConstraints:
    problems = constraint_violations(inst, ac)
    if problems:
        raise ConstraintValidationError(problems)
    return ac


def _index(mu: ManyToOneMatching) -> Tuple[Dict[str, str], Dict[str, List[str]]]:
    firm_of: Dict[str, str] = {}
    workers_of: Dict[str, List[str]] = {}
    for w, f in mu.assignment:
        firm_of[w] = f
        workers_of.setdefault(f, []).append(w)
    return firm_of, workers_of


def check_matching(inst: Instance, mu: ManyToOneMatching) -> None:
    """Reject pairs that are unknown, unacceptable or over quota."""
    _, workers_of = _index(mu)
    for w, f in mu.sorted_pairs():
        if not inst.has_worker(w) or not inst.has_firm(f):
            raise InvalidMatchingError(f"pair ({w}, {f}) names an unknown participant")
        if not inst.is_acceptable(w, f):
            raise InvalidMatchingError(f"pair ({w}, {f}) is not mutually acceptable")
    for f, workers in workers_of.items():
        if len(workers) > inst.quota(f):
            raise InvalidMatchingError(
                f"firm {f} is assigned {len(workers)} workers but has quota {inst.quota(f)}"
            )


def _blocks(inst: Instance, firm_of: Dict[str, str], workers_of: Dict[str, List[str]], w: str, f: str) -> bool:
    if not inst.is_acceptable(w, f) or firm_of.get(w) == f:
        return False
    current = firm_of.get(w)
    if current is not None and inst.worker_rank(w, current) < inst.worker_rank(w, f):
        return False
    assigned = workers_of.get(f, [])
    if len(assigned) < inst.quota(f):
        return True
    rank = inst.firm_rank(f, w)
    return any(rank < inst.firm_rank(f, other) for other in assigned)


def is_blocking_pair(inst: Instance, mu: ManyToOneMatching, w: str, f: str) -> bool:
    """True iff ``(w, f)`` would both rather be matched to each other.

    The worker must be unmatched or prefer ``f`` to its firm, and the firm
    must have a free position or prefer ``w`` to one of its workers.
    Raises ``InvalidMatchingError`` if ``mu`` itself is not a matching of ``inst``.
    """
    check_matching(inst, mu)
    firm_of, workers_of = _index(mu)
    return _blocks(inst, firm_of, workers_of, w, f)


def blocking_pairs(inst: Instance, mu: ManyToOneMatching) -> List[Tuple[str, str]]:
    check_matching(inst, mu)
    firm_of, workers_of = _index(mu)
    return [
        (w, f)
        for w in inst.workers
        for f in inst.worker_prefs[w]
        if _blocks(inst, firm_of, workers_of, w, f)
    ]


def is_stable(inst: Instance, mu: ManyToOneMatching) -> bool:
    check_matching(inst, mu)
    firm_of, workers_of = _index(mu)
    for w in inst.workers:
        for f in inst.worker_prefs[w]:
            if _blocks(inst, firm_of, workers_of, w, f):
                return False
    return True


def satisfies_constraints(mu: ManyToOneMatching, ac: AssignmentConstraints) -> bool:
    """Evaluate assignment constraints directly on a many-to-one matching."""
    firm_of, workers_of = _index(mu)
    for w, firms in ac.f_in.items():
        if firms and firm_of.get(w) not in firms:
            return False
    for w, firms in ac.f_out.items():
        if firm_of.get(w) in firms:
            return False
    for f, workers in ac.w_in.items():
        if workers and any(w not in workers for w in workers_of.get(f, [])):
            return False
    for f, workers in ac.w_out.items():
        if any(w in workers for w in workers_of.get(f, [])):
            return False
    return True
