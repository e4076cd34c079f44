import argparse
import logging

from app.api.instance_file import serialize_instance
from app.api.output import EXIT_OK
from app.services.generator_service import forbid_diagonal, generate_block_market, random_seeded_instance

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    blocks = subparsers.add_parser(
        "gen-appendix-d",
        help="Write the block market with 2^(n/2) stable matchings",
    )
    blocks.add_argument("--n", type=int, required=True, help="even number of workers and firms, at least 4")
    blocks.add_argument(
        "--forbid-diagonal-from",
        type=int,
        default=None,
        metavar="K",
        help="forbid (w_k, f_k) for every k >= K",
    )
    blocks.set_defaults(handler=run_blocks)

    random_market = subparsers.add_parser("gen-random", help="Write a seeded random market")
    random_market.add_argument("--workers", type=int, default=6, dest="max_workers", help="at most M workers")
    random_market.add_argument("--positions", type=int, default=6, dest="max_positions", help="at most Q positions")
    random_market.add_argument("--seed", type=int, default=0)
    random_market.set_defaults(handler=run_random)


def run_blocks(args: argparse.Namespace) -> int:
    instance = generate_block_market(args.n)
    ac = forbid_diagonal(args.n, args.forbid_diagonal_from) if args.forbid_diagonal_from is not None else None
    print(serialize_instance(instance, ac), end="", flush=True)
    logger.info(f"Generated block market with n={args.n}")
    return EXIT_OK


def run_random(args: argparse.Namespace) -> int:
    instance = random_seeded_instance(args.seed, args.max_workers, args.max_positions)
    print(serialize_instance(instance), end="", flush=True)
    return EXIT_OK
