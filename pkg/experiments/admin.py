import csv

from django.contrib import admin
from django.http import HttpResponse

from .models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'model_set', 'seed', 'created_by', 'created_at', 'result_hash']
    list_filter = ['model_set', 'created_at']
    search_fields = ['model_set', 'result_hash', 'created_by__username']
    readonly_fields = ['created_by', 'seed', 'model_set', 'config', 'mse_table', 'report', 'result_hash', 'report_hash', 'created_at']

    def has_add_permission(self, request):
        return False

    def has_change_permission(self, request, obj=None):
        return False

    def has_delete_permission(self, request, obj=None):
        return False

    actions = ['export_as_csv']

    @admin.action(description='Export selected runs to CSV')
    def export_as_csv(self, request, queryset):
        response = HttpResponse(content_type='text/csv')
        response['Content-Disposition'] = 'attachment; filename="experiment_runs.csv"'

        writer = csv.writer(response)
        writer.writerow(['Run', 'Models', 'Seed', 'Model', 'MSE', 'Result Hash', 'Created By', 'Created At'])

        for run in queryset:
            for model, value in run.mse_table.items():
                writer.writerow([
                    run.pk,
                    run.model_set,
                    run.seed,
                    model,
                    f"{value:.9g}",
                    run.result_hash,
                    run.created_by.username if run.created_by else '',
                    run.created_at.isoformat(),
                ])

        return response
