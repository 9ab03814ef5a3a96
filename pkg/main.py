#!/usr/bin/env python3
"""
Task-oriented CSI quantizer toolkit.

Usage:
    python main.py gen-data --config configs/default.json
    python main.py design   --config configs/single_band.json --out results/design
    python main.py train    --config configs/default.json
    python main.py eval     --config configs/default.json
    python main.py sweep    --config configs/default.json --seed 7

Exit codes: 0 success, 1 configuration error, 2 unsupported analytical case,
3 dataset fingerprint mismatch, 4 training divergence, 130 interrupted sweep.
"""

import argparse
import sys
from pathlib import Path

# Add src to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.utils.logger import logger
from src.utils.config import config
from src.utils.errors import TocqError
from src.experiments.commands import COMMANDS
from src.experiments.run_config import RunConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Design and evaluate task-oriented CSI quantizers")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, func in COMMANDS.items():
        sub = subparsers.add_parser(name, help=func.__doc__)
        sub.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
        sub.add_argument("--out", help="Output directory, overrides the config's output_dir")
        sub.add_argument("--seed", type=int, help="Base seed, overrides the config's seed list")
    return parser


def run(argv=None) -> int:
    """Parse arguments, run one command and map failures to exit codes."""
    args = build_parser().parse_args(argv)

    if not config.validate():
        print("❌ Environment configuration is invalid. Please check your .env file.")
        return 1

    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        cfg = cfg.with_output_dir(args.out)
        if args.seed is not None and args.seed < 0:
            raise ValueError(f"--seed must be >= 0, got {args.seed}")

        logger.info(f"Running '{args.command}' (config {cfg.config_hash}, output {cfg.output_dir})")
        return COMMANDS[args.command](cfg, args.seed)

    except TocqError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"❌ {e}")
        return e.exit_code
    except (ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ {e}")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
