from census.management.base import CensusCommand, format_table
from census.matrix import parse_matrix
from census.models import CensusRecord
from census.serializers import CensusReportSerializer, render_json
from census.services.census_service import CensusService, resolve_form, vr_params

KEYS = ("joint", "values", "nr", "vr", "split3", "recursion")


class Command(CensusCommand):
    """Exhaustive census of n x n matrices over a finite field"""

    help = "Exact counts of matrices by permanent, determinant and compound rank"

    def add_command_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True, help="Matrix size (vector length for vr)")
        parser.add_argument("--key", choices=KEYS, default="joint")
        parser.add_argument("--r", type=int, default=None, help="Rank of the form for --key vr")
        parser.add_argument(
            "--form", default=None, help='Explicit form for --key vr, e.g. "1,0;0,0"'
        )
        parser.add_argument(
            "--algorithm",
            choices=["auto", "laplace", "ryser"],
            default="auto",
            help="Permanent algorithm (auto: Laplace below 4x4, Ryser above)",
        )
        parser.add_argument("--save", action="store_true", help="Store the report in the database")
        parser.add_argument(
            "--reuse", action="store_true", help="Print a stored report instead of recomputing"
        )

    def run(self, cfg, **options):
        ctx = self.field(cfg)
        key = options["key"]
        # split3 is defined on 3 x 3 matrices only.
        n = 3 if key == "split3" else cfg.n

        form = None
        params = {}
        if key == "vr":
            form = parse_matrix(ctx, options["form"]) if options["form"] else None
            form = resolve_form(ctx, n, r=options["r"], form=form)
            params = vr_params(form)

        report = None
        if options["reuse"]:
            record = CensusRecord.latest(key, ctx.p, ctx.k, n, params)
            if record is not None:
                self.stderr.write(f"Reusing stored report from {record.created_at:%Y-%m-%d %H:%M}")
                report = record.to_report()

        if report is None:
            service = CensusService(
                ctx,
                budget=cfg.budget,
                workers=cfg.workers,
                backend=cfg.backend,
                algorithm=options["algorithm"],
            )
            if key == "joint":
                report = service.census_joint(n)
            elif key == "values":
                report = service.census_value_classes(n)
            elif key == "nr":
                report = service.census_Nr(n)
            elif key == "vr":
                report = service.census_Vr(n, form=form)
            elif key == "split3":
                report = service.census_split3()
            else:
                report = service.recursion_report(n)
            if options["save"]:
                record = CensusRecord.from_report(report)
                self.stderr.write(self.style.SUCCESS(f"Saved as {record.record_id}"))

        if cfg.output_format == "json":
            self.emit(cfg, render_json(CensusReportSerializer(report).data))
        else:
            self.emit(cfg, self.as_text(report))

    def as_text(self, report):
        head = (
            f"{report.key} census over {report.field}, n={report.n}: "
            f"{report.total} objects, {report.elapsed_ms:.1f} ms on {report.workers} worker(s)"
        )
        rows = sorted(report.counts.items())
        rows += [(name, value) for name, value in report.summary.items()]
        return head + "\n" + format_table(["key", "count"], rows)
