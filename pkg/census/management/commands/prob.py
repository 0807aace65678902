from fractions import Fraction

from census.formulas import per_value_bounds, prob_det_exact
from census.management.base import CensusCommand, format_table
from census.serializers import SampleEstimateSerializer, render_json
from census.services.census_service import CensusService


class Command(CensusCommand):
    """Monte Carlo estimate of P(per A = alpha) or P(det A = alpha)"""

    help = "Sample uniform random matrices and compare with the exact probability"

    def add_command_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--stat", choices=["per", "det"], default="det")
        parser.add_argument("--target", default="0", help='Element, e.g. "2" or "(1,2)"')
        parser.add_argument("--trials", type=int, default=100_000)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument(
            "--algorithm", choices=["auto", "laplace", "ryser"], default="auto"
        )

    def run(self, cfg, **options):
        ctx = self.field(cfg)
        n = cfg.n
        statistic = options["stat"]
        target = ctx.parse_element(options["target"])
        service = CensusService(
            ctx,
            budget=cfg.budget,
            workers=cfg.workers,
            backend=cfg.backend,
            algorithm=options["algorithm"],
        )
        estimate = service.sample_prob(n, statistic, target, options["trials"], cfg.seed)
        q = ctx.q
        if statistic == "det":
            estimate.exact = prob_det_exact(n, q, ctx.is_zero(target))
        elif q ** (n * n) <= cfg.budget:
            classes = service.census_value_classes(n)
            estimate.exact = Fraction(classes.counts[f"per={ctx.format(target)}"], classes.total)
        else:
            bounds = per_value_bounds(n, q)
            if bounds is not None:
                lo, hi = bounds["zero" if ctx.is_zero(target) else "nonzero"]
                if lo == hi:
                    estimate.exact = lo
                else:
                    estimate.bounds = (lo, hi)

        if cfg.output_format == "json":
            self.emit(cfg, render_json(SampleEstimateSerializer(estimate).data))
            return
        rows = [
            ("trials", estimate.trials),
            ("hits", estimate.hits),
            ("estimate", f"{estimate.estimate:.6g}"),
            ("standard error", f"{estimate.standard_error:.3g}"),
            ("seed", estimate.seed),
        ]
        if estimate.exact is not None:
            rows.append(("exact", f"{float(estimate.exact):.6g}"))
        if estimate.bounds is not None:
            rows.append(("bounds", " .. ".join(f"{float(b):.6g}" for b in estimate.bounds)))
        head = f"P({statistic} A = {estimate.target}) over {ctx}, n={n}"
        self.emit(cfg, head + "\n" + format_table(["quantity", "value"], rows))
