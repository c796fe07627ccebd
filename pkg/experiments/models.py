import hashlib

from django.conf import settings
from django.db import models

from .config import ExperimentError


class ExperimentRun(models.Model):
    """A completed experiment: config echo, MSE table and report. Append-only."""
    created_by = models.ForeignKey(
        settings.AUTH_USER_MODEL, on_delete=models.SET_NULL, null=True, blank=True
    )
    seed = models.IntegerField()
    model_set = models.CharField(max_length=32)
    config = models.JSONField(default=dict)
    mse_table = models.JSONField(default=dict)
    report = models.TextField()
    result_hash = models.CharField(max_length=64)
    report_hash = models.CharField(max_length=64, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f"run {self.pk} ({self.model_set}, seed {self.seed}) @ {self.created_at}"

    def save(self, *args, **kwargs):
        if self.pk is not None:
            raise ExperimentError("ExperimentRun is append-only and cannot be updated.")
        self.report_hash = hashlib.sha256(self.report.encode('utf-8')).hexdigest()
        super().save(*args, **kwargs)

    def delete(self, *args, **kwargs):
        raise ExperimentError("ExperimentRun is append-only and cannot be deleted.")

    @classmethod
    def record(cls, result, report: str, user=None) -> 'ExperimentRun':
        run = cls(
            created_by=user,
            seed=result.config.seed,
            model_set=','.join(result.models),
            config=result.config.as_dict(),
            mse_table=dict(result.mse_table),
            report=report,
            result_hash=result.digest(),
        )
        run.save()
        return run
