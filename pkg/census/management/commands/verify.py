from census.constructions import CONVERTERS, get_converter
from census.management.base import CensusCommand, Counterexample, format_table
from census.serializers import VerificationReportSerializer, render_json
from census.services.verification_service import verify_converter


class Command(CensusCommand):
    """Check a converter's per/det identity exhaustively or on random inputs"""

    help = "Verify per A = det Φ(A) (and det A = per Φ(A) for exchangers)"

    def add_command_arguments(self, parser):
        parser.add_argument("--map", dest="map_name", choices=CONVERTERS, required=True)
        parser.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
        parser.add_argument("--n", type=int, default=None, help="Input size (ex1, ex2, delta)")
        parser.add_argument("--m", type=int, default=None, help="Output size (ex2)")
        parser.add_argument("--trials", type=int, default=10_000)
        parser.add_argument("--seed", type=int, default=0)

    def run(self, cfg, **options):
        ctx = self.field(cfg)
        spec = get_converter(options["map_name"], n=cfg.n, m=options["m"])
        report = verify_converter(
            spec,
            ctx,
            mode=options["mode"],
            budget=cfg.budget,
            trials=options["trials"],
            seed=cfg.seed,
            workers=cfg.workers,
            backend=cfg.backend,
        )

        if cfg.output_format == "json":
            self.emit(cfg, render_json(VerificationReportSerializer(report).data))
        else:
            rows = [
                ("map", f"{report.name} ({report.n}x{report.n} -> {report.m}x{report.m})"),
                ("field", str(report.field)),
                ("mode", report.mode),
                ("checked", f"{report.checked}/{report.domain_size}"),
                ("result", "pass" if report.passed else "FAIL"),
            ]
            if not report.passed:
                rows += [("counterexample", report.counterexample), ("detail", report.detail)]
            self.emit(cfg, format_table(["", ""], rows))

        if not report.passed:
            raise Counterexample(f"{report.name} fails at {report.counterexample}: {report.detail}")
