#!/usr/bin/env python3
"""
Netgames - command-line runner
Simulates network games, learns graphs from equilibrium actions, runs sweeps
"""

import argparse
import signal
import sys
from typing import Optional

import structlog

from src.config import Config, load_experiment_config
from src.errors import ConfigError
from src.job_executor import EXIT_CONFIG, JobExecutor
from src.logging_setup import configure_logging

log = structlog.get_logger()

MODES = ("simulate", "learn", "sweep", "evaluate", "cluster")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        allow_abbrev=False,
        prog="netgames",
        description="Learn interaction networks from Nash-equilibrium actions of linear-quadratic games.",
        epilog="Any config field can be overridden with --key=value; nested fields use dots, e.g. --game.target_rho=[0.2,0.8].",
    )
    parser.add_argument("mode", choices=MODES, help="subcommand to run")
    parser.add_argument("--config", help="JSON experiment config")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point"""
    def signal_handler(sig, frame):
        log.info("Signal received, shutting down...")
        sys.exit(130)

    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)

    args, overrides = build_parser().parse_known_args(argv)

    settings = Config()
    configure_logging(settings.log_level, settings.log_format)
    is_valid, error_msg = settings.validate()
    if not is_valid:
        log.error("Configuration validation failed", error=error_msg)
        return EXIT_CONFIG

    try:
        config = load_experiment_config(args.config, overrides, mode=args.mode, defaults={"seed": settings.master_seed})
    except ConfigError as e:
        log.error("Invalid experiment config", error=str(e))
        return EXIT_CONFIG

    return JobExecutor(settings).execute_job(config)


if __name__ == "__main__":
    sys.exit(main())
