"""Matching digraph over acceptable (worker, position) pairs.

Vertices sit on an ``rows x cols`` grid. Arcs are never stored: a horizontal
arc leads from a vertex to every live vertex of its row that the worker
prefers, a vertical arc to every live vertex of its column that the firm
prefers. Both are answered from the rank tables.
"""
import logging
from typing import FrozenSet, List, Optional, Sequence, Tuple

import graphviz
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.exceptions import DigraphContractError
from app.models.schemas import SplitInstance, Vertex

logger = logging.getLogger(__name__)

FLAG_NONE = 0
FLAG_IN = 1
FLAG_OUT = 2

_FILL = {FLAG_NONE: "lightgray", FLAG_IN: "palegreen", FLAG_OUT: "lightcoral"}
_FLAG_NAMES = {FLAG_NONE: "plain", FLAG_IN: "in", FLAG_OUT: "out"}


class MatchingDigraph:
    """Grid digraph with live flags, in/out markers and best-vertex cursors.

    ``row_order[r]`` lists the columns acceptable to row ``r`` best first and
    ``col_order[c]`` the rows acceptable to column ``c``. Those tuples and the
    rank tables are shared between snapshots and never mutated; everything
    that changes during a search lives in the numpy arrays and cursor lists.
    """

    def __init__(
        self,
        row_order: Sequence[Tuple[int, ...]],
        col_order: Sequence[Tuple[int, ...]],
        row_rank: np.ndarray,
        col_rank: np.ndarray,
        live: Optional[np.ndarray] = None,
        flags: Optional[np.ndarray] = None,
    ):
        self.row_order = tuple(row_order)
        self.col_order = tuple(col_order)
        self.row_rank = row_rank
        self.col_rank = col_rank
        self.live = live if live is not None else row_rank >= 0
        self.flags = flags if flags is not None else np.zeros(row_rank.shape, dtype=np.int8)
        self.live_count = int(self.live.sum())
        # Cursors: index into row_order / col_order of the best live entry.
        # Ends: one past the last position that may still be live.
        self._row_cursor = [0] * self.rows
        self._col_cursor = [0] * self.cols
        self._row_end = [len(o) for o in self.row_order]
        self._col_end = [len(o) for o in self.col_order]
        for r in range(self.rows):
            self._advance_row(r)
        for c in range(self.cols):
            self._advance_col(c)

    @property
    def rows(self) -> int:
        return len(self.row_order)

    @property
    def cols(self) -> int:
        return len(self.col_order)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def _advance_row(self, r: int) -> None:
        order = self.row_order[r]
        k = self._row_cursor[r]
        end = self._row_end[r]
        while k < end and not self.live[r, order[k]]:
            k += 1
        self._row_cursor[r] = k

    def _advance_col(self, c: int) -> None:
        order = self.col_order[c]
        k = self._col_cursor[c]
        end = self._col_end[c]
        while k < end and not self.live[order[k], c]:
            k += 1
        self._col_cursor[c] = k

    def _require_live(self, v: Vertex) -> None:
        r, c = v
        if not (0 <= r < self.rows and 0 <= c < self.cols) or not self.live[r, c]:
            raise DigraphContractError(f"vertex {v} is not live")

    def is_live(self, v: Vertex) -> bool:
        r, c = v
        return 0 <= r < self.rows and 0 <= c < self.cols and bool(self.live[r, c])

    def best_col(self, r: int) -> Optional[int]:
        """Column f'(r): the live vertex of row ``r`` with no horizontal arc out."""
        k = self._row_cursor[r]
        if k >= self._row_end[r]:
            return None
        return self.row_order[r][k]

    def best_row(self, c: int) -> Optional[int]:
        """Row w'(c): the live vertex of column ``c`` with no vertical arc out."""
        k = self._col_cursor[c]
        if k >= self._col_end[c]:
            return None
        return self.col_order[c][k]

    def row_live(self, r: int) -> List[int]:
        """Live columns of row ``r``, best first."""
        order = self.row_order[r]
        return [c for c in order[self._row_cursor[r]:self._row_end[r]] if self.live[r, c]]

    def col_live(self, c: int) -> List[int]:
        order = self.col_order[c]
        return [r for r in order[self._col_cursor[c]:self._col_end[c]] if self.live[r, c]]

    def row_is_empty(self, r: int) -> bool:
        return self.best_col(r) is None

    def col_is_empty(self, c: int) -> bool:
        return self.best_row(c) is None

    def nonempty_rows(self) -> List[int]:
        return [r for r in range(self.rows) if not self.row_is_empty(r)]

    def nonempty_cols(self) -> List[int]:
        return [c for c in range(self.cols) if not self.col_is_empty(c)]

    def live_vertices(self) -> List[Vertex]:
        rows, cols = np.nonzero(self.live)
        return [(int(r), int(c)) for r, c in zip(rows, cols)]

    def out_degree_w(self, v: Vertex) -> int:
        """Number of live vertices in v's row the worker strictly prefers."""
        self._require_live(v)
        r, c = v
        order = self.row_order[r]
        rank = int(self.row_rank[r, c])
        return sum(1 for c2 in order[self._row_cursor[r]:rank] if self.live[r, c2])

    def out_degree_f(self, v: Vertex) -> int:
        """Number of live vertices in v's column the firm strictly prefers."""
        self._require_live(v)
        r, c = v
        order = self.col_order[c]
        rank = int(self.col_rank[r, c])
        return sum(1 for r2 in order[self._col_cursor[c]:rank] if self.live[r2, c])

    def delete_vertex(self, v: Vertex) -> "MatchingDigraph":
        self._require_live(v)
        r, c = v
        self.live[r, c] = False
        self.flags[r, c] = FLAG_NONE
        self.live_count -= 1
        if self.best_col(r) is None or self.row_order[r][self._row_cursor[r]] == c:
            self._advance_row(r)
        if self.best_row(c) is None or self.col_order[c][self._col_cursor[c]] == r:
            self._advance_col(c)
        return self

    def delete_worse_in_row(self, v: Vertex) -> List[Vertex]:
        """Delete every live vertex of v's row the worker likes less than v."""
        r, c = v
        order = self.row_order[r]
        start = int(self.row_rank[r, c]) + 1
        deleted = [(r, c2) for c2 in order[start:self._row_end[r]] if self.live[r, c2]]
        for u in deleted:
            self.delete_vertex(u)
        self._row_end[r] = min(self._row_end[r], start)
        return deleted

    def delete_worse_in_col(self, v: Vertex) -> List[Vertex]:
        """Delete every live vertex of v's column the firm likes less than v."""
        r, c = v
        order = self.col_order[c]
        start = int(self.col_rank[r, c]) + 1
        deleted = [(r2, c) for r2 in order[start:self._col_end[c]] if self.live[r2, c]]
        for u in deleted:
            self.delete_vertex(u)
        self._col_end[c] = min(self._col_end[c], start)
        return deleted

    def flag(self, v: Vertex) -> int:
        r, c = v
        return int(self.flags[r, c])

    def set_flag(self, v: Vertex, flag: int) -> None:
        self._require_live(v)
        r, c = v
        self.flags[r, c] = flag

    def flagged(self, flag: int) -> FrozenSet[Vertex]:
        rows, cols = np.nonzero((self.flags == flag) & self.live)
        return frozenset((int(r), int(c)) for r, c in zip(rows, cols))

    def snapshot(self) -> "MatchingDigraph":
        clone = MatchingDigraph.__new__(MatchingDigraph)
        clone.row_order = self.row_order
        clone.col_order = self.col_order
        clone.row_rank = self.row_rank
        clone.col_rank = self.col_rank
        clone.live = self.live.copy()
        clone.flags = self.flags.copy()
        clone.live_count = self.live_count
        clone._row_cursor = list(self._row_cursor)
        clone._col_cursor = list(self._col_cursor)
        clone._row_end = list(self._row_end)
        clone._col_end = list(self._col_end)
        return clone

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatchingDigraph):
            return NotImplemented
        return (
            self.shape == other.shape
            and bool(np.array_equal(self.live, other.live))
            and bool(np.array_equal(np.where(self.live, self.flags, 0), np.where(other.live, other.flags, 0)))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"MatchingDigraph(rows={self.rows}, cols={self.cols}, live={self.live_count})"

    def to_dot(self, split: Optional[SplitInstance] = None, name: str = "matching_digraph") -> graphviz.Digraph:
        """Render live vertices on their grid positions.

        Only arcs to the nearest preferred live vertex are drawn; the rest
        follow by transitivity.
        """
        def node_id(v: Vertex) -> str:
            return f"v{v[0]}_{v[1]}"

        def node_label(v: Vertex) -> str:
            if split is not None:
                return split.vertex_label(v)
            return f"({v[0] + 1},{v[1] + 1})"

        dot = graphviz.Digraph(name=name)
        dot.attr("node", shape="circle", style="filled", fontsize="10")
        for v in self.live_vertices():
            flag = self.flag(v)
            dot.node(
                node_id(v),
                node_label(v),
                pos=f"{v[1]},{-v[0]}!",
                fillcolor=_FILL[flag],
                **{"class": _FLAG_NAMES[flag]},
            )
        for r in range(self.rows):
            live_cols = self.row_live(r)
            for better, worse in zip(live_cols, live_cols[1:]):
                dot.edge(node_id((r, worse)), node_id((r, better)), color="black")
        for c in range(self.cols):
            live_rows = self.col_live(c)
            for better, worse in zip(live_rows, live_rows[1:]):
                dot.edge(node_id((worse, c)), node_id((better, c)), color="blue")
        return dot


def build_digraph(split: SplitInstance) -> MatchingDigraph:
    """Digraph with every mutually acceptable (worker, position) pair live."""
    rows, cols = split.rows, split.cols
    row_rank = np.full((rows, cols), -1, dtype=np.int32)
    col_rank = np.full((rows, cols), -1, dtype=np.int32)
    for r, prefs in enumerate(split.worker_prefs_expanded):
        for k, c in enumerate(prefs):
            row_rank[r, c] = k
    for c, prefs in enumerate(split.column_prefs):
        for k, r in enumerate(prefs):
            col_rank[r, c] = k
    if not np.array_equal(row_rank >= 0, col_rank >= 0):
        raise DigraphContractError("row and column preferences disagree on acceptability")
    digraph = MatchingDigraph(
        row_order=[tuple(p) for p in split.worker_prefs_expanded],
        col_order=[tuple(p) for p in split.column_prefs],
        row_rank=row_rank,
        col_rank=col_rank,
    )
    logger.debug(f"Built digraph {rows}x{cols} with {digraph.live_count} vertices")
    return digraph


class NormalForm(BaseModel):
    """Fixpoint of iterated deletion with its balance count ``r``."""
    digraph: MatchingDigraph
    r: int
    matched_rows: Tuple[int, ...]
    matched_cols: Tuple[int, ...]

    model_config = ConfigDict(arbitrary_types_allowed=True)


class SearchNode(BaseModel):
    """State handed to one recursive enumeration call."""
    digraph: MatchingDigraph
    v_in: FrozenSet[Vertex] = frozenset()
    v_out: FrozenSet[Vertex] = frozenset()
    depth: int = Field(0, ge=0)

    model_config = ConfigDict(arbitrary_types_allowed=True)
