import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Dict, List, Optional, Tuple

import numpy as np
from celery import group
from django.conf import settings

from census.exceptions import BudgetExceeded, DimensionMismatch, RankOutOfRange
from census.formulas import poly_Vrk
from census.gf import FieldCtx, field_new
from census.kernels import sample_hits
from census.matrix import FMatrix, block_identity, rank
from census.tasks import run_tally, tally_chunk

logger = logging.getLogger(__name__)

STATISTICS = ("per", "det")


@dataclass
class CensusReport:
    """Exact counts from one exhaustive run.

    counts maps a statistic key to an exact count; summary holds derived
    totals such as the |P_n| and |D_n| marginals. params records the inputs
    beyond (field, n) that shaped the counts, e.g. the form of a vr run.
    """

    key: str
    field: FieldCtx
    n: int
    total: int
    counts: Dict[str, int]
    summary: Dict[str, int] = field(default_factory=dict)
    elapsed_ms: float = 0.0
    workers: int = 1
    backend: str = "local"
    seed: Optional[int] = None
    params: Dict[str, str] = field(default_factory=dict)


@dataclass
class NrReport(CensusReport):
    """Zero-permanent m x m matrices split by the rank of their compound."""

    @property
    def m(self):
        return self.n

    @property
    def by_rank(self) -> Dict[int, int]:
        return {int(r): c for r, c in self.counts.items()}


@dataclass
class SampleEstimate:
    field: FieldCtx
    n: int
    statistic: str
    target: str
    trials: int
    hits: int
    seed: int
    workers: int = 1
    elapsed_ms: float = 0.0
    exact: Optional[Fraction] = None
    bounds: Optional[Tuple[Fraction, Fraction]] = None

    @property
    def estimate(self):
        return self.hits / self.trials

    @property
    def standard_error(self):
        p_hat = self.estimate
        return math.sqrt(p_hat * (1 - p_hat) / self.trials)


def _sample_worker(p, k, n, statistic, target, trials, seed_seq, algorithm):
    return sample_hits(field_new(p, k), n, statistic, target, trials, seed_seq, algorithm)


def resolve_form(ctx: FieldCtx, k: int, r: Optional[int] = None, form: Optional[FMatrix] = None) -> FMatrix:
    """The k x k bilinear form of a vr census: the explicit form, else Id_r ⊕ 0_(k-r)."""
    if form is None:
        if r is None:
            raise ValueError("census_Vr needs a rank r or a form matrix")
        if not 0 <= r <= k:
            raise RankOutOfRange(f"rank {r} is outside 0..{k}")
        return block_identity(ctx, r, k)
    if form.n != k:
        raise DimensionMismatch(f"form must be {k}x{k}, got {form.n}x{form.n}")
    return form


def vr_params(form: FMatrix) -> Dict[str, str]:
    return {"form": str(form)}


def _split(total, parts):
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


class CensusService:
    """Exhaustive censuses and Monte Carlo estimates over one field"""

    def __init__(
        self,
        ctx: FieldCtx,
        budget: Optional[int] = None,
        workers: Optional[int] = None,
        backend: Optional[str] = None,
        algorithm: str = "auto",
        chunk_size: Optional[int] = None,
    ):
        self.ctx = ctx
        self.budget = budget or settings.PERMCENSUS_BUDGET
        self.workers = workers or settings.PERMCENSUS_WORKERS
        self.backend = backend or settings.PERMCENSUS_BACKEND
        self.algorithm = algorithm
        self.chunk_size = chunk_size or settings.PERMCENSUS_CHUNK_SIZE
        if self.backend not in ("local", "celery"):
            raise ValueError(f"unknown backend {self.backend!r}")

    # plumbing

    def check_budget(self, required: int, what: str = "matrices"):
        if required > self.budget:
            logger.warning(
                "Refusing %s census over %s: %s %s > budget %s",
                what, self.ctx, required, what, self.budget,
            )
            raise BudgetExceeded(required, self.budget, what)

    def _ranges(self, total):
        size = max(1, min(self.chunk_size, math.ceil(total / self.workers)))
        return [(lo, min(lo + size, total)) for lo in range(0, total, size)]

    def _tally(self, kind: str, n: int, total: int, form=None) -> List[int]:
        p, k = self.ctx.p, self.ctx.k
        jobs = [
            (kind, p, k, n, lo, hi, self.algorithm, form) for lo, hi in self._ranges(total)
        ]
        logger.info(
            "Census %s over %s, n=%s: %s objects in %s chunks, %s worker(s), %s backend",
            kind, self.ctx, n, total, len(jobs), self.workers, self.backend,
        )
        if self.backend == "celery":
            results = group(tally_chunk.s(*job) for job in jobs).apply_async().get()
        elif self.workers == 1:
            results = [run_tally(*job) for job in jobs]
        else:
            with Pool(self.workers) as pool:
                results = pool.starmap(run_tally, jobs)
        merged = [0] * len(results[0])
        for cells in results:
            for i, c in enumerate(cells):
                merged[i] += int(c)
        return merged

    def _report(self, cls, key, n, total, counts, summary, started, params=None):
        elapsed = (time.perf_counter() - started) * 1000
        logger.info("Census %s over %s, n=%s finished in %.1f ms", key, self.ctx, n, elapsed)
        return cls(
            key=key,
            field=self.ctx,
            n=n,
            total=total,
            counts=counts,
            summary=summary,
            elapsed_ms=elapsed,
            workers=self.workers,
            backend=self.backend,
            params=params or {},
        )

    def _joint_cells(self, n):
        if n < 1:
            raise DimensionMismatch("n must be at least 1")
        total = self.ctx.q ** (n * n)
        self.check_budget(total)
        return total, self._tally("joint", n, total)

    # censuses

    def census_joint(self, n: int) -> CensusReport:
        """Exact count of n x n matrices for every (per, det) value pair."""
        started = time.perf_counter()
        f, q = self.ctx, self.ctx.q
        total, cells = self._joint_cells(n)
        counts = {}
        for cell, c in enumerate(cells):
            if c:
                lam, mu = f.element(cell // q), f.element(cell % q)
                counts[f"per={f.format(lam)},det={f.format(mu)}"] = c
        summary = {
            "P_n": sum(cells[:q]),
            "D_n": sum(cells[0::q]),
        }
        return self._report(CensusReport, "joint", n, total, counts, summary, started)

    def census_value_classes(self, n: int) -> CensusReport:
        """Per-value histograms of det and per."""
        started = time.perf_counter()
        f, q = self.ctx, self.ctx.q
        total, cells = self._joint_cells(n)
        counts = {}
        for statistic, stride, width in (("per", q, 1), ("det", 1, q)):
            for v in range(q):
                key = f"{statistic}={f.format(f.element(v))}"
                counts[key] = sum(cells[v * stride + width * j] for j in range(q))
        summary = {
            f"{statistic}_nonzero_uniform": int(
                len({counts[f"{statistic}={f.format(f.element(v))}"] for v in range(1, q)}) <= 1
            )
            for statistic in STATISTICS
        }
        return self._report(CensusReport, "values", n, total, counts, summary, started)

    def census_Nr(self, m: int) -> NrReport:
        """|N^(r)_m| for r = 0..m."""
        started = time.perf_counter()
        if m < 1:
            raise DimensionMismatch("m must be at least 1")
        total = self.ctx.q ** (m * m)
        self.check_budget(total)
        cells = self._tally("nr", m, total)
        counts = {str(r): c for r, c in enumerate(cells)}
        return self._report(NrReport, "nr", m, total, counts, {"P_m": sum(cells)}, started)

    def census_Vr(self, k: int, r: Optional[int] = None, form: Optional[FMatrix] = None) -> CensusReport:
        """Pairs (x, y) in F^k x F^k with x^tr A y = 0.

        A defaults to Id_r ⊕ 0_(k-r); any k x k form may be passed instead.
        """
        started = time.perf_counter()
        f = self.ctx
        form = resolve_form(f, k, r=r, form=form)
        total = f.q ** (2 * k)
        self.check_budget(total, what="vector pairs")
        matrix = [[f.index(a) for a in row] for row in form.rows]
        zeros = self._tally("vr", k, total, form=matrix)[0]
        summary = {"rank": rank(form), "V": zeros}
        counts = {"zero": zeros, "nonzero": total - zeros}
        return self._report(
            CensusReport, "vr", k, total, counts, summary, started, params=vr_params(form)
        )

    def census_split3(self) -> CensusReport:
        """3 x 3 matrices with zero det/per split by a33 and the lower-right 2 x 2 block."""
        started = time.perf_counter()
        total = self.ctx.q**9
        self.check_budget(total)
        cells = self._tally("split3", 3, total)
        counts = dict(zip(("D'", "D''", "D'''", "P'", "P''", "P'''"), cells))
        summary = {"D_n": sum(cells[:3]), "P_n": sum(cells[3:])}
        return self._report(CensusReport, "split3", 3, total, counts, summary, started)

    def recursion_report(self, n: int) -> CensusReport:
        """|P_n| assembled from the (n-1) compound-rank census."""
        started = time.perf_counter()
        if n < 2:
            raise DimensionMismatch("the recursion starts at n = 2")
        q = self.ctx.q
        m = n - 1
        nr = self.census_Nr(m)
        p_prev = sum(nr.by_rank.values())
        value = (q ** (m * m) - p_prev) * q ** (2 * m)
        summary = {"P_(n-1)": p_prev}
        for r, count in nr.by_rank.items():
            v = poly_Vrk(m, r)(q)
            value += q * count * v
            summary[f"N{r}"] = count
            summary[f"V{r}"] = v
        return self._report(
            CensusReport, "recursion", n, q ** (n * n), {"P_n": value}, summary, started
        )

    def exact_Pn_by_recursion(self, n: int) -> int:
        return self.recursion_report(n).counts["P_n"]

    # sampling

    def sample_prob(self, n: int, statistic: str, target, trials: int, seed: int) -> SampleEstimate:
        """Estimate P(statistic(A) = target) from uniformly random matrices.

        Worker w draws from PCG64 seeded with the w-th child of SeedSequence(seed),
        so a run is reproducible for a fixed (seed, trials, workers).
        """
        if trials < 1:
            raise ValueError("trials must be at least 1")
        if statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
        started = time.perf_counter()
        f = self.ctx
        target = f.coerce(target)
        target_index = f.index(target)
        root = np.random.SeedSequence(seed)
        if self.workers == 1:
            hits = sample_hits(f, n, statistic, target_index, trials, root, self.algorithm)
        else:
            jobs = [
                (f.p, f.k, n, statistic, target_index, share, child, self.algorithm)
                for share, child in zip(_split(trials, self.workers), root.spawn(self.workers))
            ]
            with Pool(self.workers) as pool:
                hits = sum(pool.starmap(_sample_worker, jobs))
        elapsed = (time.perf_counter() - started) * 1000
        logger.info(
            "Sampled %s trials of %s over %s, n=%s: %s hits (seed %s)",
            trials, statistic, f, n, hits, seed,
        )
        return SampleEstimate(
            field=f,
            n=n,
            statistic=statistic,
            target=f.format(target),
            trials=trials,
            hits=hits,
            seed=seed,
            workers=self.workers,
            elapsed_ms=elapsed,
        )
