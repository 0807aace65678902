from django.core.management.base import CommandError

from census.formulas import MAX_THRESHOLD_N, REFERENCE_THRESHOLDS, find_threshold
from census.management.base import EXIT_USAGE, CensusCommand, format_csv
from census.serializers import ThresholdRowSerializer, render_json


class Command(CensusCommand):
    """Crossover table: least field order where the upper bound falls below |D_n|"""

    help = "Compute (n, i, q) rows where U_n(q) < |D_n(q)| from q = i on"
    formats = ("csv", "json")
    needs_field = False

    def add_command_arguments(self, parser):
        parser.add_argument("--n-min", type=int, default=3)
        parser.add_argument("--n-max", type=int, default=MAX_THRESHOLD_N)
        parser.add_argument(
            "--both-readings",
            action="store_true",
            help="Also print q_any, the least prime power >= i of any characteristic",
        )

    def run(self, cfg, **options):
        n_min, n_max = options["n_min"], options["n_max"]
        if not 3 <= n_min <= n_max <= MAX_THRESHOLD_N:
            raise CommandError(
                f"need 3 <= n-min <= n-max <= {MAX_THRESHOLD_N}", returncode=EXIT_USAGE
            )
        rows = [find_threshold(n) for n in range(n_min, n_max + 1)]

        for row in rows:
            reference = REFERENCE_THRESHOLDS.get(row.n)
            if reference and reference != (row.i, row.q):
                self.stderr.write(
                    self.style.WARNING(
                        f"n={row.n}: computed i={row.i}, q={row.q} (any characteristic: "
                        f"q={row.q_any}); reference row is i={reference[0]}, q={reference[1]}"
                    )
                )

        if cfg.output_format == "json":
            self.emit(cfg, render_json(ThresholdRowSerializer(rows, many=True).data))
            return
        headers = ["n", "i", "q"]
        if options["both_readings"]:
            headers.append("q_any")
        table = [[getattr(row, h) for h in headers] for row in rows]
        self.emit(cfg, format_csv(headers, table))
