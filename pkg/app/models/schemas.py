from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_serializer, model_validator

# A vertex of the matching digraph: (row, column) = (worker index, position index).
Vertex = Tuple[int, int]


class ViolationKind(str, Enum):
    """Kinds of structural problems found while validating a market."""
    DUPLICATE_PARTICIPANT = "duplicate_participant"
    UNKNOWN_PARTICIPANT = "unknown_participant"
    DUPLICATE_ENTRY = "duplicate_entry"
    EMPTY_LIST = "empty_list"
    ASYMMETRIC = "asymmetric_acceptability"
    BAD_QUOTA = "bad_quota"


class Violation(BaseModel):
    """One validation finding, naming the participants involved."""
    kind: ViolationKind
    participants: Tuple[str, ...]
    message: str


class Firm(BaseModel):
    """A firm and the number of positions it offers."""
    name: str = Field(..., min_length=1)
    quota: int = 1

    model_config = ConfigDict(frozen=True)


class InstanceBase(BaseModel):
    """Base many-to-one market model."""
    workers: Tuple[str, ...]
    firms: Tuple[Firm, ...]
    worker_prefs: Dict[str, Tuple[str, ...]]
    firm_prefs: Dict[str, Tuple[str, ...]]

    def violations(self) -> List[Violation]:
        """Collect every structural violation instead of stopping at the first."""
        found: List[Violation] = []
        firm_names = [f.name for f in self.firms]

        for label, names in (("worker", self.workers), ("firm", firm_names)):
            seen = set()
            for name in names:
                if name in seen:
                    found.append(Violation(
                        kind=ViolationKind.DUPLICATE_PARTICIPANT,
                        participants=(name,),
                        message=f"{label} {name} is declared more than once",
                    ))
                seen.add(name)

        workers = set(self.workers)
        firms = set(firm_names)
        if workers & firms:
            for name in sorted(workers & firms):
                found.append(Violation(
                    kind=ViolationKind.DUPLICATE_PARTICIPANT,
                    participants=(name,),
                    message=f"{name} is declared both as a worker and as a firm",
                ))

        for firm in self.firms:
            if firm.quota < 1:
                found.append(Violation(
                    kind=ViolationKind.BAD_QUOTA,
                    participants=(firm.name,),
                    message=f"firm {firm.name} has quota {firm.quota}, expected at least 1",
                ))

        found.extend(_side_violations("worker", self.workers, workers, firms, self.worker_prefs))
        found.extend(_side_violations("firm", firm_names, firms, workers, self.firm_prefs))

        for w, prefs in self.worker_prefs.items():
            if w not in workers:
                continue
            for f in prefs:
                if f in firms and w not in self.firm_prefs.get(f, ()):
                    found.append(Violation(
                        kind=ViolationKind.ASYMMETRIC,
                        participants=(w, f),
                        message=f"worker {w} lists firm {f} but {f} does not list {w}",
                    ))
        for f, prefs in self.firm_prefs.items():
            if f not in firms:
                continue
            for w in prefs:
                if w in workers and f not in self.worker_prefs.get(w, ()):
                    found.append(Violation(
                        kind=ViolationKind.ASYMMETRIC,
                        participants=(w, f),
                        message=f"firm {f} lists worker {w} but {w} does not list {f}",
                    ))
        return found


def _side_violations(label, declared, own, other, prefs) -> List[Violation]:
    found: List[Violation] = []
    for name in prefs:
        if name not in own:
            found.append(Violation(
                kind=ViolationKind.UNKNOWN_PARTICIPANT,
                participants=(name,),
                message=f"preference list given for unknown {label} {name}",
            ))
    for name in declared:
        entries = prefs.get(name, ())
        if not entries:
            found.append(Violation(
                kind=ViolationKind.EMPTY_LIST,
                participants=(name,),
                message=f"{label} {name} finds nobody acceptable",
            ))
            continue
        seen = set()
        for entry in entries:
            if entry in seen:
                found.append(Violation(
                    kind=ViolationKind.DUPLICATE_ENTRY,
                    participants=(name, entry),
                    message=f"{label} {name} lists {entry} more than once",
                ))
            seen.add(entry)
            if entry not in other:
                found.append(Violation(
                    kind=ViolationKind.UNKNOWN_PARTICIPANT,
                    participants=(name, entry),
                    message=f"{label} {name} lists unknown participant {entry}",
                ))
    return found


class InstanceCreate(InstanceBase):
    """Raw market description, as parsed from a file, before validation."""
    pass


class Instance(InstanceBase):
    """Validated many-to-one market with O(1) rank lookups."""

    model_config = ConfigDict(frozen=True)

    _worker_index: Dict[str, int] = PrivateAttr(default_factory=dict)
    _firm_index: Dict[str, int] = PrivateAttr(default_factory=dict)
    _quota: Dict[str, int] = PrivateAttr(default_factory=dict)
    _worker_rank: Dict[str, Dict[str, int]] = PrivateAttr(default_factory=dict)
    _firm_rank: Dict[str, Dict[str, int]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def check_structure(self) -> "Instance":
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(p.message for p in problems))
        return self

    def model_post_init(self, __context) -> None:
        self._worker_index = {w: i for i, w in enumerate(self.workers)}
        self._firm_index = {f.name: j for j, f in enumerate(self.firms)}
        self._quota = {f.name: f.quota for f in self.firms}
        self._worker_rank = {w: {f: k for k, f in enumerate(p)} for w, p in self.worker_prefs.items()}
        self._firm_rank = {f: {w: k for k, w in enumerate(p)} for f, p in self.firm_prefs.items()}

    @property
    def m(self) -> int:
        return len(self.workers)

    @property
    def n(self) -> int:
        return len(self.firms)

    @property
    def firm_names(self) -> Tuple[str, ...]:
        return tuple(f.name for f in self.firms)

    @property
    def total_positions(self) -> int:
        return sum(f.quota for f in self.firms)

    def quota(self, firm: str) -> int:
        return self._quota[firm]

    def has_worker(self, worker: str) -> bool:
        return worker in self._worker_index

    def has_firm(self, firm: str) -> bool:
        return firm in self._firm_index

    def worker_index(self, worker: str) -> int:
        return self._worker_index[worker]

    def firm_index(self, firm: str) -> int:
        return self._firm_index[firm]

    def worker_rank(self, worker: str, firm: str) -> Optional[int]:
        """Position of ``firm`` in ``worker``'s list, ``None`` if unacceptable."""
        return self._worker_rank[worker].get(firm)

    def firm_rank(self, firm: str, worker: str) -> Optional[int]:
        return self._firm_rank[firm].get(worker)

    def is_acceptable(self, worker: str, firm: str) -> bool:
        return firm in self._worker_rank.get(worker, {})


class AssignmentConstraints(BaseModel):
    """Per-participant required and forbidden partner sets."""
    f_in: Dict[str, FrozenSet[str]] = Field(default_factory=dict)
    f_out: Dict[str, FrozenSet[str]] = Field(default_factory=dict)
    w_in: Dict[str, FrozenSet[str]] = Field(default_factory=dict)
    w_out: Dict[str, FrozenSet[str]] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    def is_empty(self) -> bool:
        return not any(s for table in (self.f_in, self.f_out, self.w_in, self.w_out) for s in table.values())

    def contradictions(self) -> List[str]:
        """Participants whose required and forbidden sets overlap."""
        found = []
        for w in sorted(set(self.f_in) & set(self.f_out)):
            overlap = self.f_in[w] & self.f_out[w]
            if overlap:
                found.append(f"worker {w} is both required and forbidden at {', '.join(sorted(overlap))}")
        for f in sorted(set(self.w_in) & set(self.w_out)):
            overlap = self.w_in[f] & self.w_out[f]
            if overlap:
                found.append(f"firm {f} both requires and forbids {', '.join(sorted(overlap))}")
        return found

    @field_serializer("f_in", "f_out", "w_in", "w_out")
    def _sorted_sets(self, table: Dict[str, FrozenSet[str]]):
        return {k: sorted(v) for k, v in sorted(table.items())}


def _check_one_per_line(pairs, what: str) -> None:
    rows = [r for r, _ in pairs]
    cols = [c for _, c in pairs]
    if len(set(rows)) != len(rows):
        raise ValueError(f"{what} uses a row more than once")
    if len(set(cols)) != len(cols):
        raise ValueError(f"{what} uses a column more than once")


class PairConstraints(BaseModel):
    """Forced (``v_in``) and forbidden (``v_out``) vertices of the one-to-one problem."""
    v_in: FrozenSet[Vertex] = frozenset()
    v_out: FrozenSet[Vertex] = frozenset()

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_disjoint(self) -> "PairConstraints":
        if self.v_in & self.v_out:
            raise ValueError("forced and forbidden vertex sets overlap")
        _check_one_per_line(self.v_in, "forced vertex set")
        return self

    @field_serializer("v_in", "v_out")
    def _sorted_vertices(self, vertices: FrozenSet[Vertex]):
        return sorted(vertices)


class Matching(BaseModel):
    """Independent vertex set of the grid: at most one vertex per row and per column."""
    pairs: FrozenSet[Vertex] = frozenset()

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_independent(self) -> "Matching":
        _check_one_per_line(self.pairs, "matching")
        return self

    @classmethod
    def of(cls, pairs) -> "Matching":
        return cls(pairs=frozenset(pairs))

    @property
    def size(self) -> int:
        return len(self.pairs)

    def sorted_pairs(self) -> List[Vertex]:
        return sorted(self.pairs)

    @field_serializer("pairs")
    def _sorted_pairs(self, pairs: FrozenSet[Vertex]):
        return sorted(pairs)


class ManyToOneMatching(BaseModel):
    """Worker-firm assignment; each worker appears at most once."""
    assignment: FrozenSet[Tuple[str, str]] = frozenset()

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_workers_once(self) -> "ManyToOneMatching":
        workers = [w for w, _ in self.assignment]
        if len(set(workers)) != len(workers):
            raise ValueError("a worker appears in more than one pair")
        return self

    @classmethod
    def of(cls, pairs) -> "ManyToOneMatching":
        return cls(assignment=frozenset(pairs))

    def firm_of(self, worker: str) -> Optional[str]:
        for w, f in self.assignment:
            if w == worker:
                return f
        return None

    def workers_of(self, firm: str) -> List[str]:
        return sorted(w for w, f in self.assignment if f == firm)

    def sorted_pairs(self) -> List[Tuple[str, str]]:
        return sorted(self.assignment)

    @field_serializer("assignment")
    def _sorted_assignment(self, assignment: FrozenSet[Tuple[str, str]]):
        return sorted(assignment)


class Column(BaseModel):
    """One position of a firm after splitting; ``copy_index`` counts from 1."""
    firm: str
    copy_index: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)


class SplitInstance(BaseModel):
    """One-to-one market obtained by splitting every firm into quota-many copies."""
    base: Instance
    columns: Tuple[Column, ...]
    column_prefs: Tuple[Tuple[int, ...], ...]
    worker_prefs_expanded: Tuple[Tuple[int, ...], ...]

    model_config = ConfigDict(frozen=True)

    _firm_columns: Dict[str, Tuple[int, ...]] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        by_firm: Dict[str, List[int]] = {}
        for c, column in enumerate(self.columns):
            by_firm.setdefault(column.firm, []).append(c)
        self._firm_columns = {f: tuple(cs) for f, cs in by_firm.items()}

    @property
    def rows(self) -> int:
        return len(self.worker_prefs_expanded)

    @property
    def cols(self) -> int:
        return len(self.columns)

    def columns_of(self, firm: str) -> Tuple[int, ...]:
        return self._firm_columns.get(firm, ())

    def column_label(self, col: int) -> str:
        """``f4#1`` style label for copies, the bare firm name for quota-one firms."""
        column = self.columns[col]
        if self.base.quota(column.firm) == 1:
            return column.firm
        return f"{column.firm}#{column.copy_index}"

    def row_label(self, row: int) -> str:
        return self.base.workers[row]

    def vertex_label(self, vertex: Vertex) -> str:
        row, col = vertex
        return f"({self.row_label(row)}, {self.column_label(col)})"


class Verdict(str, Enum):
    """Outcome of comparing assignment constraints against the normal form."""
    FEASIBLE = "feasible-so-far"
    INFEASIBLE = "infeasible"


class ConstraintReduction(BaseModel):
    """Assignment constraints compiled to forced/forbidden vertices."""
    pair_constraints: PairConstraints = Field(default_factory=PairConstraints)
    dropped_redundant: Tuple[str, ...] = ()
    verdict: Verdict = Verdict.FEASIBLE
    reason: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @property
    def feasible(self) -> bool:
        return self.verdict == Verdict.FEASIBLE


class RuralHospitalsReport(BaseModel):
    """Who is in and who is out in every stable matching."""
    never_employed: Tuple[str, ...] = ()
    never_filled: Tuple[str, ...] = ()
    always_filled: Tuple[str, ...] = ()
    underfilled_firms: Tuple[str, ...] = ()
    fixed_pairs: Tuple[Tuple[str, str], ...] = ()
    fixed_firms: Tuple[str, ...] = ()

    model_config = ConfigDict(frozen=True)


class EnumerationMode(str, Enum):
    """Which stable matchings the enumerator reports."""
    ALL = "all"
    WORKER_OPTIMAL = "worker-opt"
    FIRM_OPTIMAL = "firm-opt"


class Solution(BaseModel):
    """One emitted stable matching, in both one-to-one and merged form."""
    index: int
    matching: Matching
    assignment: ManyToOneMatching
    delay_seconds: float = 0.0


class EnumerationStats(BaseModel):
    """Search-tree accounting for one enumeration run."""
    call_count: int = 0
    deletions: int = 0
    max_depth: int = 0
    delays: List[float] = Field(default_factory=list)

    @property
    def max_delay(self) -> float:
        return max(self.delays, default=0.0)


class SolutionStream(BaseModel):
    """Stable matchings in emission order with search statistics."""
    solutions: List[Solution] = Field(default_factory=list)
    stats: EnumerationStats = Field(default_factory=EnumerationStats)
    r: int = 0
    verdict: Verdict = Verdict.FEASIBLE
    reason: Optional[str] = None
    dropped_redundant: Tuple[str, ...] = ()
    partial: bool = False

    @property
    def matchings(self) -> List[Matching]:
        return [s.matching for s in self.solutions]

    @property
    def assignments(self) -> List[ManyToOneMatching]:
        return [s.assignment for s in self.solutions]


class OracleResult(BaseModel):
    """Exhaustively computed stable matchings of a small market."""
    assignments: Tuple[ManyToOneMatching, ...] = ()
    matchings: Tuple[Matching, ...] = ()
    candidates_examined: int = 0
    total_stable: int = 0
    after_filter: int = 0

    model_config = ConfigDict(frozen=True)


class SolutionRecord(BaseModel):
    """JSON shape of one solution."""
    index: int
    assignment: List[Tuple[str, str]]
    vertices: List[Tuple[str, str]]


class SolveReport(BaseModel):
    """JSON document printed by ``solve --format json``."""
    verdict: Verdict
    reason: Optional[str] = None
    mode: EnumerationMode
    r: int
    partial: bool = False
    dropped_redundant: List[str] = Field(default_factory=list)
    solutions: List[SolutionRecord] = Field(default_factory=list)
    call_count: int = 0
    deletions: int = 0
    max_delay_seconds: float = 0.0


class ErrorResponse(BaseModel):
    """Error response model."""
    detail: str
    error_code: Optional[str] = None
