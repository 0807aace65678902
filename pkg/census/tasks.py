import logging

from celery import shared_task

from .constructions import check_range, get_converter
from .gf import field_new
from .kernels import tally_range

logger = logging.getLogger(__name__)


def run_tally(kind, p, k, n, start, stop, algorithm="auto", form=None):
    """Tally one index range; shared by the process pool and the Celery worker."""
    ctx = field_new(p, k)
    return tally_range(kind, ctx, n, start, stop, algorithm=algorithm, form=form)


def run_verify(map_name, p, k, n, m, start, stop):
    ctx = field_new(p, k)
    spec = get_converter(map_name, n=n, m=m)
    checked, failed_at = check_range(spec, ctx, start, stop)
    return [checked, failed_at]


# Exact counts: chunk tasks never retry, a failed chunk fails the census.
@shared_task(bind=True, acks_late=True)
def tally_chunk(self, kind, p, k, n, start, stop, algorithm="auto", form=None):
    """
    Count one contiguous range of the census odometer

    Args:
        kind: "joint", "nr", "vr" or "split3"
        p, k: the field GF(p^k)
        n: matrix size (vector length for "vr")
        start, stop: half-open index range
        algorithm: permanent algorithm, "auto", "laplace" or "ryser"
        form: k x k index matrix for "vr"

    Returns:
        List of integer counts, one per cell of the tally
    """
    logger.debug("Task %s tallying %s over GF(%s^%s) [%s, %s)", self.request.id, kind, p, k, start, stop)
    try:
        return run_tally(kind, p, k, n, start, stop, algorithm, form)
    except Exception:
        logger.exception("Tally chunk %s [%s, %s) failed", kind, start, stop)
        raise


@shared_task(bind=True, acks_late=True)
def verify_chunk(self, map_name, p, k, n, m, start, stop):
    """
    Check a converter identity on inputs start..stop-1

    Returns:
        [number of inputs checked, index of the first counterexample or -1]
    """
    logger.debug("Task %s verifying %s [%s, %s)", self.request.id, map_name, start, stop)
    try:
        return run_verify(map_name, p, k, n, m, start, stop)
    except Exception:
        logger.exception("Verify chunk %s [%s, %s) failed", map_name, start, stop)
        raise
