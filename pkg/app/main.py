"""Command-line front end for the random walk toolkit."""

import argparse
import logging
import sys
from pathlib import Path

from app.config import parse_config
from app.errors import BudgetGuardError, CombWalkError, ConfigError, CriterionDegenerateError
from app.models import SUBCOMMAND_KINDS
from app.runner import run, verify_all
from app.settings import get_out_dir, get_threads

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s | %(levelname)-7s | %(name)s | %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger("combwalk")

EXIT_PASS = 0
EXIT_VERDICT_FAILED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


def _add_common_flags(parser: argparse.ArgumentParser, needs_config: bool) -> None:
    if needs_config:
        parser.add_argument("--config", type=Path, required=True, help="Path to a key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (overrides the config)")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (default: COMBWALK_THREADS)")
    parser.add_argument("--out", type=Path, default=None, help="Artifact directory (default: COMBWALK_OUT_DIR)")
    parser.add_argument("--format", choices=["csv", "json", "both"], default="both", help="Artifact format")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combwalk",
        description="Random walkers on Z^d and on the comb: simulation, exact kernels and experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for command, help_text in (
        ("simulate", "Simulate single walks and compare constructions"),
        ("exact", "Exact kernels, generating functions and passage laws"),
        ("experiment", "Monte Carlo experiments on ensembles of walkers"),
    ):
        _add_common_flags(sub.add_parser(command, help=help_text), needs_config=True)

    verify = sub.add_parser("verify-all", help="Run every acceptance check")
    _add_common_flags(verify, needs_config=False)
    verify.add_argument("--scale", choices=["quick", "full"], default="quick", help="Suite size")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    out_dir = args.out or get_out_dir()
    threads = get_threads() if args.threads is None else args.threads

    if args.command == "verify-all":
        seed = 20240601 if args.seed is None else args.seed
        outcome = verify_all(out_dir, scale=args.scale, seed=seed, threads=threads, fmt=args.format)
    else:
        overrides = {"master_seed": args.seed, "threads": threads}
        config = parse_config(args.config, overrides)
        if config.kind not in SUBCOMMAND_KINDS[args.command]:
            raise ConfigError([f"kind: {config.kind.value} does not belong to the '{args.command}' subcommand"])
        outcome = run(config, out_dir, args.format)

    for path in outcome.paths:
        print(f"Wrote {path}")
    failed = [v for v in outcome.report.verdicts if not v.passed]
    for verdict in outcome.report.verdicts:
        status = "PASS" if verdict.passed else "FAIL"
        print(f"  [{status}] {verdict.name}: {verdict.claim}")
    print(f"{len(outcome.report.verdicts) - len(failed)}/{len(outcome.report.verdicts)} verdicts passed")
    return EXIT_VERDICT_FAILED if failed else EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return _dispatch(args)
    except ConfigError as e:
        for violation in e.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetGuardError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (CriterionDegenerateError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Artifact write failed: {e}")
        return EXIT_USAGE
    except CombWalkError as e:
        logger.exception(f"Run failed: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"Unhandled error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
