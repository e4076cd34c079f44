"""Exit codes and text rendering shared by the subcommands."""
from typing import Iterable

from app.models.schemas import Instance, ManyToOneMatching, SplitInstance, Vertex

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INPUT_ERROR = 2


def format_assignment(inst: Instance, mu: ManyToOneMatching) -> str:
    """``w1:f2 w2:f1 ...`` in worker order; unmatched workers are left out."""
    firm_of = dict(mu.assignment)
    return " ".join(f"{w}:{firm_of[w]}" for w in inst.workers if w in firm_of)


def format_vertices(split: SplitInstance, vertices: Iterable[Vertex]) -> str:
    return " ".join(
        f"{split.row_label(r)}:{split.column_label(c)}" for r, c in sorted(vertices)
    )


def emit_line(text: str) -> None:
    print(text, flush=True)
