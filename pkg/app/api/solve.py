import argparse
import logging

from app.api.instance_file import load_instance
from app.api.output import EXIT_NO_SOLUTION, EXIT_OK, emit_line, format_assignment
from app.core.config import settings
from app.models.schemas import (
    EnumerationMode,
    Instance,
    Solution,
    SolutionRecord,
    SolutionStream,
    SolveReport,
    SplitInstance,
    Verdict,
)
from app.services import get_enumeration_service
from app.services.reduction_service import split_firms

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="Enumerate stable matchings that satisfy the constraints")
    parser.add_argument("file", help="instance file")
    parser.add_argument(
        "--mode",
        choices=[m.value for m in EnumerationMode],
        default=settings.default_mode,
        help="all solutions, or only the worker-/firm-optimal one",
    )
    parser.add_argument("--limit", type=int, default=None, help="stop after K solutions")
    parser.add_argument("--format", choices=["text", "json"], default="text", dest="output_format")
    parser.set_defaults(handler=run)


def solution_record(inst: Instance, split: SplitInstance, solution: Solution) -> SolutionRecord:
    firm_of = dict(solution.assignment.assignment)
    return SolutionRecord(
        index=solution.index,
        assignment=[(w, firm_of[w]) for w in inst.workers if w in firm_of],
        vertices=[
            (split.row_label(r), split.column_label(c)) for r, c in solution.matching.sorted_pairs()
        ],
    )


def build_report(inst: Instance, stream: SolutionStream, mode: EnumerationMode) -> SolveReport:
    split = split_firms(inst)
    return SolveReport(
        verdict=stream.verdict,
        reason=stream.reason,
        mode=mode,
        r=stream.r,
        partial=stream.partial,
        dropped_redundant=list(stream.dropped_redundant),
        solutions=[solution_record(inst, split, s) for s in stream.solutions],
        call_count=stream.stats.call_count,
        deletions=stream.stats.deletions,
        max_delay_seconds=stream.stats.max_delay,
    )


def run(args: argparse.Namespace) -> int:
    if args.limit is not None and args.limit < 1:
        raise ValueError("--limit must be at least 1")
    instance, ac = load_instance(args.file)
    mode = EnumerationMode(args.mode)
    service = get_enumeration_service(parallel=getattr(args, "parallel", None))

    text = args.output_format == "text"
    on_solution = (lambda s: emit_line(format_assignment(instance, s.assignment))) if text else None
    stream = service.enumerate(instance, ac, mode=mode, limit=args.limit, on_solution=on_solution)

    if text:
        if stream.verdict == Verdict.INFEASIBLE:
            emit_line(f"infeasible: {stream.reason}")
        elif not stream.solutions:
            emit_line(f"no solutions: {stream.reason}")
    else:
        emit_line(build_report(instance, stream, mode).model_dump_json(indent=2))

    logger.info(f"{len(stream.solutions)} solutions for {args.file}")
    return EXIT_OK if stream.solutions else EXIT_NO_SOLUTION
