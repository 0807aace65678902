import logging
import math
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional

import numpy as np
from celery import group
from django.conf import settings

from census.constructions import check_range
from census.exceptions import BudgetExceeded
from census.gf import FieldCtx
from census.tasks import run_verify, verify_chunk

logger = logging.getLogger(__name__)

MODES = ("exhaustive", "random")


@dataclass
class VerificationReport:
    name: str
    field: FieldCtx
    n: int
    m: int
    mode: str
    checked: int
    domain_size: int
    counterexample: Optional[str] = None
    detail: Optional[str] = None
    elapsed_ms: float = 0.0
    workers: int = 1
    seed: Optional[int] = None

    @property
    def passed(self):
        return self.counterexample is None


def _ranges(total, workers, chunk_size):
    size = max(1, min(chunk_size, math.ceil(total / workers)))
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def verify_converter(
    spec,
    ctx: FieldCtx,
    mode: str = "exhaustive",
    budget: Optional[int] = None,
    trials: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    backend: Optional[str] = None,
) -> VerificationReport:
    """
    Check a converter's defining identity on its whole domain or a random sample

    Args:
        spec: a ConverterSpec or FamilySpec
        ctx: the field
        mode: "exhaustive" sweeps every input, "random" draws `trials` inputs
        budget: exhaustive sweeps larger than this raise BudgetExceeded
        seed: PCG64 seed for random mode
        workers, backend: parallel sweep of registered converters

    Returns:
        VerificationReport naming the first counterexample, if any
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    budget = budget or settings.PERMCENSUS_BUDGET
    backend = backend or settings.PERMCENSUS_BACKEND
    started = time.perf_counter()
    size = spec.domain_size(ctx)
    failed = None

    if mode == "exhaustive":
        if size > budget:
            logger.warning("Refusing exhaustive %s over %s: %s inputs", spec.name, ctx, size)
            raise BudgetExceeded(size, budget, what="inputs")
        # Only registry-built specs can be rebuilt by name in another process.
        if spec.registered and (workers > 1 or backend == "celery"):
            jobs = [
                (spec.name, ctx.p, ctx.k, spec.n, spec.m, lo, hi)
                for lo, hi in _ranges(size, workers, settings.PERMCENSUS_CHUNK_SIZE)
            ]
            if backend == "celery":
                results = group(verify_chunk.s(*job) for job in jobs).apply_async().get()
            else:
                with Pool(workers) as pool:
                    results = pool.starmap(run_verify, jobs)
            failures = [at for _, at in results if at >= 0]
            failed = min(failures) if failures else None
            checked = size if failed is None else failed + 1
        else:
            checked, at = check_range(spec, ctx, 0, size)
            failed = at if at >= 0 else None
        item = spec.input_at(ctx, failed) if failed is not None else None
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        checked = 0
        item = None
        for _ in range(trials):
            candidate = spec.random_input(ctx, rng)
            checked += 1
            if spec.check(ctx, candidate) is not None:
                item = candidate
                break

    report = VerificationReport(
        name=spec.name,
        field=ctx,
        n=spec.n,
        m=spec.m,
        mode=mode,
        checked=checked,
        domain_size=size,
        elapsed_ms=(time.perf_counter() - started) * 1000,
        workers=workers,
        seed=seed if mode == "random" else None,
    )
    if item is not None:
        report.counterexample = spec.describe(ctx, item)
        report.detail = spec.check(ctx, item)
        logger.error(
            "Converter %s fails over %s at %s: %s",
            spec.name, ctx, report.counterexample, report.detail,
        )
    else:
        logger.info("Converter %s holds on %s inputs over %s", spec.name, checked, ctx)
    return report
