import argparse
import logging
import sys
from typing import Optional, Sequence

from app.api import generate, normal_form, oracle, solve, validate
from app.api.output import EXIT_INPUT_ERROR
from app.core.config import settings
from app.core.exceptions import SolverError
from app.models.schemas import ErrorResponse

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablematch",
        description=f"{settings.app_name} {settings.app_version}: "
        "enumerate stable matchings under assignment constraints",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default: %(default)s)")
    parser.add_argument(
        "--parallel",
        action="store_true",
        default=None,
        help="explore independent search branches on a thread pool; emission order is then unspecified",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register subcommands
    validate.register(subparsers)
    normal_form.register(subparsers)
    solve.register(subparsers)
    oracle.register(subparsers)
    generate.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else 0

    # Configure logging; stdout carries results only
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format=settings.log_format,
        stream=sys.stderr,
    )
    json_output = getattr(args, "output_format", "text") == "json"

    try:
        return args.handler(args)
    except (SolverError, ValueError) as e:
        error = e if isinstance(e, SolverError) else SolverError(str(e), "INVALID_ARGUMENT")
        logger.error(f"{args.command} failed: {error.detail}")
        if json_output:
            print(ErrorResponse(detail=error.detail, error_code=error.error_code).model_dump_json(indent=2))
        else:
            print(f"error: {error.detail}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
