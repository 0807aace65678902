from census.formulas import asymptotic_check, bound_set, poly_Dn
from census.management.base import CensusCommand, format_table
from census.serializers import BoundSetSerializer, render_json


class Command(CensusCommand):
    """Lower/upper bound polynomials for the number of zero-permanent matrices"""

    help = "Print L_n, U_n and the auxiliary N^(0), N^(1) bounds as coefficient lists"
    needs_field = False

    def add_command_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--at", type=int, default=None, help="Also evaluate at this q")

    def run(self, cfg, **options):
        n = cfg.n
        if n < 1:
            raise ValueError("n must be positive")
        bounds = bound_set(n)
        D = poly_Dn(n)
        checks = []
        if n >= 4:
            checks = [asymptotic_check(P, n, kind) for kind, P in (("L", bounds.L), ("U", bounds.U), ("D", D))]
        q = options["at"]

        if cfg.output_format == "json":
            data = dict(BoundSetSerializer(bounds).data)
            data["D"] = D.to_list()
            data["asymptotics"] = [
                {"kind": c.kind, "passed": c.passed, "failures": c.failures} for c in checks
            ]
            if q is not None:
                data["values"] = {"q": q, "L": bounds.L(q), "U": bounds.U(q), "D": D(q)}
            self.emit(cfg, render_json(data))
            return

        rows = [("L", bounds.L), ("U", bounds.U), ("N0", bounds.N0), ("N1", bounds.N1), ("D", D)]
        rows = [(name, str(P)) for name, P in rows if P is not None]
        rows += [(f"{c.kind} leading terms", "ok" if c.passed else "; ".join(c.failures)) for c in checks]
        if q is not None:
            rows += [(f"{name}({q})", P(q)) for name, P in (("L", bounds.L), ("U", bounds.U), ("D", D))]
        self.emit(cfg, format_table(["bound", f"n={n}"], rows))
