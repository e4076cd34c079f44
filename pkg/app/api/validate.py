import argparse
import logging

from app.api.instance_file import load_instance
from app.api.output import EXIT_OK, emit_line

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="Check an instance file and report violations")
    parser.add_argument("file", help="instance file")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Parse and validate; input errors propagate to the entry point."""
    instance, ac = load_instance(args.file)
    emit_line(
        f"valid: {instance.m} workers, {instance.n} firms, "
        f"{instance.total_positions} positions"
    )
    if not ac.is_empty():
        # Contradictions are a valid query with answer "no"; solve reports them.
        contradictions = ac.contradictions()
        emit_line("constraints: " + ("; ".join(contradictions) if contradictions else "ok"))
    logger.info(f"Validated {args.file}")
    return EXIT_OK
