import argparse
import logging

from app.api.instance_file import load_instance
from app.api.output import EXIT_NO_SOLUTION, EXIT_OK, emit_line, format_assignment
from app.services import get_oracle_service

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "oracle",
        help="Brute-force every stable matching of a small market and filter by the constraints",
    )
    parser.add_argument("file", help="instance file")
    parser.add_argument(
        "--max-candidates",
        type=int,
        default=None,
        metavar="B",
        help="refuse markets with more than B candidate matchings",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    instance, ac = load_instance(args.file)
    service = get_oracle_service(args.max_candidates)
    result = service.constrained(instance, ac)
    for mu in result.assignments:
        emit_line(format_assignment(instance, mu))
    emit_line(
        f"stable: {result.total_stable}, satisfying constraints: {result.after_filter}, "
        f"candidates examined: {result.candidates_examined}"
    )
    return EXIT_OK if result.assignments else EXIT_NO_SOLUTION
