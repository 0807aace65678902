"""Shared option parsing, error mapping and output for the census commands"""

import csv
import io
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from census.exceptions import BudgetExceeded, PermCensusError
from census.gf import parse_field_spec

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_COUNTEREXAMPLE = 3


@dataclass
class RunConfig:
    """Parsed options of one command invocation"""

    subcommand: str
    field_spec: Optional[str]
    n: Optional[int]
    budget: int
    workers: int
    seed: Optional[int]
    output_format: str
    output_path: Optional[str]
    backend: str


class Counterexample(CommandError):
    """A converter identity failed; the report has already been written"""

    def __init__(self, message):
        super().__init__(message, returncode=EXIT_COUNTEREXAMPLE)


class UsageParser(CommandParser):
    """CommandParser whose usage errors exit 1, keeping 2 for budget refusals"""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=EXIT_USAGE)


class CensusCommand(BaseCommand):
    """Base for the census commands: common options and the exit-code contract.

    Subclasses implement run(cfg, **options). BudgetExceeded becomes exit
    code 2, other engine and parse errors exit code 1.
    """

    formats = ("json", "text")
    needs_field = True

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = UsageParser
        return parser

    def add_arguments(self, parser):
        if self.needs_field:
            parser.add_argument("--field", required=True, help='Field spec "p" or "p^k"')
        parser.add_argument(
            "--budget",
            type=int,
            default=None,
            help="Most matrices an exhaustive run may evaluate (default: PERMCENSUS_BUDGET)",
        )
        parser.add_argument(
            "--workers",
            type=int,
            default=None,
            help="Worker processes or Celery chunks (default: PERMCENSUS_WORKERS)",
        )
        parser.add_argument(
            "--backend",
            choices=["local", "celery"],
            default=None,
            help="Where chunks run (default: PERMCENSUS_BACKEND)",
        )
        parser.add_argument(
            "--format", dest="output_format", choices=self.formats, default=self.formats[0]
        )
        parser.add_argument("--output", default=None, help="Write the report to this file")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        """Hook for command specific options"""

    def run_config(self, options):
        budget = options.get("budget") or settings.PERMCENSUS_BUDGET
        workers = options.get("workers") or settings.PERMCENSUS_WORKERS
        if budget < 1 or workers < 1:
            raise CommandError("--budget and --workers must be positive", returncode=EXIT_USAGE)
        return RunConfig(
            subcommand=self.__module__.rsplit(".", 1)[-1],
            field_spec=options.get("field"),
            n=options.get("n"),
            budget=budget,
            workers=workers,
            seed=options.get("seed"),
            output_format=options["output_format"],
            output_path=options.get("output"),
            backend=options.get("backend") or settings.PERMCENSUS_BACKEND,
        )

    def field(self, cfg):
        return parse_field_spec(cfg.field_spec)

    def handle(self, *args, **options):
        cfg = self.run_config(options)
        try:
            self.run(cfg, **options)
        except BudgetExceeded as exc:
            logger.warning("%s: %s", cfg.subcommand, exc)
            raise CommandError(str(exc), returncode=EXIT_BUDGET) from exc
        except (PermCensusError, ValueError) as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc

    def run(self, cfg, **options):
        raise NotImplementedError

    def emit(self, cfg, text):
        if cfg.output_path:
            Path(cfg.output_path).write_text(text + "\n", encoding="utf-8")
            self.stderr.write(self.style.SUCCESS(f"Report written to {cfg.output_path}"))
        else:
            self.stdout.write(text)


def format_table(headers, rows):
    """Aligned text columns, numbers right-aligned"""
    rows = [[str(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def format_csv(headers, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return out.getvalue().rstrip("\n")
