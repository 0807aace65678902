import time

import numpy as np

from census import kernels
from census import matrix
from census.management.base import CensusCommand, format_csv

HEADERS = ["n", "algorithm", "mode", "matrices", "seconds", "matrices_per_second"]


class Command(CensusCommand):
    """Time Laplace against Ryser, one matrix at a time and in numpy batches"""

    help = "Benchmark permanent algorithms across n and emit CSV"
    formats = ("csv",)

    def add_command_arguments(self, parser):
        parser.add_argument("--n-min", type=int, default=1)
        parser.add_argument("--n-max", type=int, default=6)
        parser.add_argument("--matrices", type=int, default=500, help="Matrices per measurement")
        parser.add_argument("--seed", type=int, default=0)

    def run(self, cfg, **options):
        ctx = self.field(cfg)
        count = options["matrices"]
        if count < 1 or options["n_min"] < 1 or options["n_max"] > matrix.MAX_DIM:
            raise ValueError(f"need --matrices >= 1 and 1 <= n <= {matrix.MAX_DIM}")
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        arith = kernels.arith_for(ctx)
        rows = []
        for n in range(options["n_min"], options["n_max"] + 1):
            stack = rng.integers(0, ctx.q, size=(count, n, n), dtype=np.int64)
            scalar = [
                matrix.FMatrix.from_rows(ctx, [[ctx.element(int(v)) for v in row] for row in A])
                for A in stack
            ]
            for name in ("laplace", "ryser"):
                for mode in ("scalar", "batch"):
                    started = time.perf_counter()
                    if mode == "scalar":
                        for A in scalar:
                            matrix.per(A, name)
                    else:
                        kernels.per(arith, stack, name)
                    seconds = time.perf_counter() - started
                    rate = count / seconds if seconds else float("inf")
                    rows.append([n, name, mode, count, f"{seconds:.6f}", f"{rate:.1f}"])
                    self.stderr.write(f"n={n} {name}/{mode}: {seconds:.3f} s")
        self.emit(cfg, format_csv(HEADERS, rows))
