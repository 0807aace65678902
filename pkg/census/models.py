"""Stored census reports"""

import uuid

from django.db import models

from .gf import field_new


# pylint: disable=no-member
class CensusRecord(models.Model):
    """One finished census, counts kept exact as decimal strings"""

    KEY_CHOICES = [
        ("joint", "Joint per/det"),
        ("values", "Value classes"),
        ("nr", "Compound rank N^(r)"),
        ("vr", "Bilinear zeros V^(r)"),
        ("split3", "3x3 split"),
        ("recursion", "|P_n| by recursion"),
    ]

    BACKEND_CHOICES = [
        ("local", "Local"),
        ("celery", "Celery"),
    ]

    record_id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    key = models.CharField(max_length=16, choices=KEY_CHOICES)
    p = models.PositiveIntegerField()
    k = models.PositiveSmallIntegerField(default=1)
    q = models.PositiveIntegerField()
    n = models.PositiveSmallIntegerField()
    total = models.CharField(max_length=255)
    counts = models.JSONField(default=dict)
    summary = models.JSONField(default=dict)
    elapsed_ms = models.FloatField(default=0.0)
    workers = models.PositiveIntegerField(default=1)
    backend = models.CharField(max_length=10, choices=BACKEND_CHOICES, default="local")
    seed = models.BigIntegerField(blank=True, null=True)
    params = models.JSONField(default=dict, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        """Census record table definition"""

        db_table = "census_record"
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["key", "p", "k", "n"], name="idx_census_lookup"),
        ]

    def __str__(self):
        field_spec = str(self.p) if self.k == 1 else f"{self.p}^{self.k}"
        return f"{self.key} GF({field_spec}) n={self.n}"

    @classmethod
    def from_report(cls, report):
        f = report.field
        return cls.objects.create(
            key=report.key,
            p=f.p,
            k=f.k,
            q=f.q,
            n=report.n,
            total=str(report.total),
            counts={name: str(c) for name, c in report.counts.items()},
            summary={name: str(c) for name, c in report.summary.items()},
            elapsed_ms=report.elapsed_ms,
            workers=report.workers,
            backend=report.backend,
            seed=report.seed,
            params=dict(report.params),
        )

    @classmethod
    def latest(cls, key, p, k, n, params=None):
        """Newest record for exactly these inputs; a vr form must match too."""
        return cls.objects.filter(key=key, p=p, k=k, n=n, params=params or {}).first()

    def to_report(self):
        # Local import keeps model loading free of the service layer.
        from .services.census_service import CensusReport, NrReport

        report_cls = NrReport if self.key == "nr" else CensusReport
        return report_cls(
            key=self.key,
            field=field_new(self.p, self.k),
            n=self.n,
            total=int(self.total),
            counts={name: int(c) for name, c in self.counts.items()},
            summary={name: int(c) for name, c in self.summary.items()},
            elapsed_ms=self.elapsed_ms,
            workers=self.workers,
            backend=self.backend,
            seed=self.seed,
            params=dict(self.params),
        )
