"""
Command-line entry point for growgraph experiments
"""
import argparse
import logging
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .config import config
from .errors import CostGuardError, InvalidInputError
from .router import router
from .schemas import ConvergeRequest, DegreeRequest, EquivalenceRequest, GrowRequest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_COST_GUARD = 3

REQUESTS = {
    "grow": GrowRequest,
    "converge": ConvergeRequest,
    "equivalence": EquivalenceRequest,
    "degree": DegreeRequest,
}


def _n_grid(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n-grid must be a comma list of integers, got '{text}'")


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seed must be an integer, got '{text}'")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"--seed must fit in 64 unsigned bits, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growgraph",
        description="Growing random graphs and their graphon limits",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="64-bit master seed")
    common.add_argument("--workers", type=int, default=config.workers,
                        help="replicate worker processes (output does not depend on it)")

    sub = parser.add_subparsers(dest="command", required=True)

    grow = sub.add_parser("grow", parents=[common], help="grow one graph and write it as an edge list")
    grow.add_argument("--model", choices=["c1", "c2", "polya"], default="c2")
    grow.add_argument("--nu", default="uniform", help="point:P | twopoint:P | uniform | table:FILE")
    grow.add_argument("--laws", default=None, help="per-step degree laws file (c1 only)")
    grow.add_argument("--n", type=int, required=True)
    grow.add_argument("--out", default=None, help="edge-list output path")

    converge = sub.add_parser("converge", parents=[common], help="mean t(F, G_n) against the limit t_F")
    converge.add_argument("--model", choices=["c1", "c2"], default="c2")
    converge.add_argument("--nu", default="uniform")
    converge.add_argument("--laws", default=None)
    converge.add_argument("--pattern", default="k2", help="k2 | p3 | k3 | c4 | k4 | FILE")
    converge.add_argument("--n-grid", dest="n_grid", type=_n_grid, default=[32, 64, 128, 256])
    converge.add_argument("--reps", type=int, default=200)

    equivalence = sub.add_parser("equivalence", parents=[common],
                                 help="Monte Carlo class histograms against the exact small-n law")
    equivalence.add_argument("--nu", default="uniform")
    equivalence.add_argument("--n", type=int, default=4)
    equivalence.add_argument("--samples", type=int, default=100_000)
    equivalence.add_argument("--format", choices=["json", "csv"], default="json",
                             help="report as a JSON document or as key,value CSV rows")

    degree = sub.add_parser("degree", parents=[common], help="scaled indegree D_n/n against nu")
    degree.add_argument("--nu", default="uniform")
    degree.add_argument("--n", type=int, default=1000)
    degree.add_argument("--reps", type=int, default=10_000)
    degree.add_argument("--scale", choices=["n", "n-1"], default="n")
    return parser


def main(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    logging.basicConfig(
        level=getattr(logging, config.log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    if not config.validate():
        logger.warning(f"⚠️ Ignoring invalid runtime settings: log_level={config.log_level}, workers={config.workers}")
    stream = stream if stream is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    params = {k: v for k, v in vars(args).items() if v is not None}
    try:
        request = REQUESTS[args.command](**params)
        return router.process_request(request, stream)
    except ValidationError as e:
        logger.error(f"❌ Invalid arguments for {args.command}: {e}")
        return EXIT_INVALID
    except CostGuardError as e:
        logger.error(f"❌ Refused by size guard: {e}")
        return EXIT_COST_GUARD
    except InvalidInputError as e:
        logger.error(f"❌ Invalid input: {e}")
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"❌ {args.command} failed: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
